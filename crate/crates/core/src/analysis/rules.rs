//! Checks over funcon rules, entity declarations and translation-equation
//! right sides.

use std::collections::{BTreeMap, BTreeSet};

use crate::analysis::symbols::{Resolved, SymbolTable};
use crate::diag::{sort_diagnostics, Category, Diagnostic};
use crate::span::SourceSpan;
use crate::syntax::*;
use crate::term::Term;
use crate::value::Name;

/// Names reserved in every language for leaf translations.
pub const LEAF_FUNCTIONS: [&str; 2] = ["id", "int"];

/// Argument counts and optional-result positions of every application in
/// rules and equation right sides, plus resolution of the applied names.
pub fn check_arity(spec: &CbsSpec, table: &SymbolTable) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for f in &spec.funcon_defs {
        for r in &f.rules {
            let ck = ArityCheck {
                table,
                span: &r.span,
                translation: None,
            };
            for t in rule_terms(r) {
                ck.term(t, &mut diags);
            }
        }
    }
    for e in &spec.entity_decls {
        if let Some(d) = &e.default {
            ArityCheck {
                table,
                span: &e.span,
                translation: None,
            }
            .term(d, &mut diags);
        }
    }
    for lang in &spec.language_specs {
        let fns: BTreeSet<&str> = lang
            .semantics_decls
            .iter()
            .map(|d| &*d.fn_name)
            .chain(LEAF_FUNCTIONS)
            .collect();
        for eq in &lang.equations {
            let ops: BTreeMap<&str, Option<RegOp>> = eq.lhs.vars().map(|(n, _, op)| (&**n, op)).collect();
            ArityCheck {
                table,
                span: &eq.span,
                translation: Some((&fns, &ops)),
            }
            .term(&eq.rhs, &mut diags);
        }
    }
    sort_diagnostics(&mut diags);
    diags
}

/// Every term occurring in a rule.
pub fn rule_terms(r: &Rule) -> Vec<&Term> {
    let mut out = vec![&r.lhs, &r.rhs];
    let bindings = r
        .context_reads
        .iter()
        .chain(&r.state_reads)
        .chain(&r.entity_writes)
        .chain(&r.emitted);
    out.extend(bindings.map(|b| &b.term));
    for p in &r.premises {
        out.push(&p.result);
        let bs = p
            .ctx_overrides
            .iter()
            .chain(&p.state_before)
            .chain(&p.state_after)
            .chain(&p.observed_signals);
        out.extend(bs.map(|b| &b.term));
    }
    for c in &r.side_conditions {
        match c {
            Condition::Eq(a, b) | Condition::Ne(a, b) => {
                out.push(a);
                out.push(b);
            }
            Condition::HasSort(a, _) => out.push(a),
        }
    }
    out
}

type Translation<'a> = (&'a BTreeSet<&'a str>, &'a BTreeMap<&'a str, Option<RegOp>>);

struct ArityCheck<'a> {
    table: &'a SymbolTable,
    span: &'a SourceSpan,
    /// Translation functions of the language and the regular operators of
    /// the equation's meta-variables, when checking an equation.
    translation: Option<Translation<'a>>,
}

impl ArityCheck<'_> {
    fn err(&self, cat: Category, msg: String, diags: &mut Vec<Diagnostic>) {
        diags.push(Diagnostic::error(cat, self.span.clone(), msg));
    }

    /// Whether an argument may expand to a number of arguments other than one.
    fn is_splice(&self, t: &Term) -> bool {
        match t {
            Term::Var(v) => v.seq,
            Term::Apply(n, args) => match self.translation {
                Some((fns, ops)) if fns.contains(&**n) => matches!(
                    args.first(),
                    Some(Term::Var(v)) if ops.get(&*v.name).is_some_and(|op| op.is_some())
                ),
                _ => false,
            },
            Term::Value(_) => false,
        }
    }

    fn term(&self, t: &Term, diags: &mut Vec<Diagnostic>) {
        let Term::Apply(name, args) = t else { return };
        if let Some((fns, _)) = self.translation {
            if fns.contains(&**name) {
                if args.len() != 1 || !matches!(args[0], Term::Var(_)) {
                    self.err(
                        Category::Arity,
                        format!("translation function `{name}` takes exactly one meta-variable"),
                        diags,
                    );
                }
                return;
            }
        }
        let fixed = args.iter().filter(|a| !self.is_splice(a)).count();
        let splices = fixed < args.len();
        match self.table.resolve(name) {
            Some(Resolved::Funcon(f)) => {
                let sig = &f.signature;
                let ok = if splices {
                    sig.is_variadic() || fixed <= sig.fixed_arity()
                } else {
                    sig.accepts(args.len())
                };
                if !ok {
                    let expected = if sig.is_variadic() {
                        format!("at least {}", sig.fixed_arity())
                    } else {
                        sig.fixed_arity().to_string()
                    };
                    self.err(
                        Category::Arity,
                        format!("`{name}` expects {expected} argument(s), given {}", args.len()),
                        diags,
                    );
                }
                for (i, a) in args.iter().enumerate() {
                    if sig.is_strict_at(i) {
                        self.optional_in_strict(name, a, diags);
                    }
                }
            }
            Some(Resolved::Constructor(_, c)) => {
                let ok = if splices {
                    fixed <= c.arg_sorts.len()
                } else {
                    args.len() == c.arg_sorts.len()
                };
                if !ok {
                    self.err(
                        Category::Arity,
                        format!(
                            "constructor `{name}` expects {} argument(s), given {}",
                            c.arg_sorts.len(),
                            args.len()
                        ),
                        diags,
                    );
                }
                for a in args {
                    self.optional_in_strict(name, a, diags);
                }
            }
            None => self.err(
                Category::UnknownName,
                format!("unknown funcon or constructor `{name}`"),
                diags,
            ),
        }
        for a in args {
            self.term(a, diags);
        }
    }

    fn optional_in_strict(&self, parent: &Name, arg: &Term, diags: &mut Vec<Diagnostic>) {
        if let Term::Apply(n, _) = arg {
            if let Some(Resolved::Funcon(g)) = self.table.resolve(n) {
                if g.signature.result_optional {
                    self.err(
                        Category::UndefinedResult,
                        format!("`{n}` may compute no result, but `{parent}` pre-evaluates this argument"),
                        diags,
                    );
                }
            }
        }
    }
}

/// Source dependence: every meta-variable used is bound earlier in the rule.
pub fn check_rule_variables(spec: &CbsSpec) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for f in &spec.funcon_defs {
        for r in &f.rules {
            rule_variables(r, &mut diags);
        }
    }
    for lang in &spec.language_specs {
        for eq in &lang.equations {
            let bound: BTreeSet<&str> = eq.lhs.vars().map(|(n, _, _)| &**n).collect();
            let used = eq.rhs.vars();
            for v in used.iter().filter(|v| !bound.contains(&***v)) {
                diags.push(unbound(v, &eq.span));
            }
        }
        for d in &lang.desugar_rules {
            let bound: BTreeSet<&str> = d.lhs.vars().map(|(n, _, _)| &**n).collect();
            let used: BTreeSet<&str> = d.rhs.vars().map(|(n, _, _)| &**n).collect();
            for v in used.difference(&bound) {
                diags.push(unbound(v, &d.span));
            }
        }
    }
    sort_diagnostics(&mut diags);
    diags
}

fn unbound(v: &str, span: &SourceSpan) -> Diagnostic {
    Diagnostic::error(
        Category::UnboundVar,
        span.clone(),
        format!("meta-variable `{v}` is not bound by the left side, a premise, an entity or a condition"),
    )
}

fn rule_variables(r: &Rule, diags: &mut Vec<Diagnostic>) {
    let mut bound = BTreeSet::new();
    r.lhs.collect_vars(&mut bound);
    for b in r.entity_reads() {
        b.term.collect_vars(&mut bound);
    }
    let require = |t: &Term, bound: &BTreeSet<Name>, diags: &mut Vec<Diagnostic>| {
        for v in t.vars() {
            if !bound.contains(&v) {
                diags.push(unbound(&v, &r.span));
            }
        }
    };
    for p in &r.premises {
        if !bound.contains(&p.subject) {
            diags.push(unbound(&p.subject, &r.span));
        }
        if matches!(&p.result, Term::Var(v) if v.name == p.subject) {
            diags.push(Diagnostic::error(
                Category::PatternMismatch,
                r.span.clone(),
                format!("premise result must differ from its subject `{}`", p.subject),
            ));
        }
        for b in &p.ctx_overrides {
            require(&b.term, &bound, diags);
        }
        for b in &p.state_before {
            b.term.collect_vars(&mut bound);
        }
        p.result.collect_vars(&mut bound);
        for b in p.state_after.iter().chain(&p.observed_signals) {
            b.term.collect_vars(&mut bound);
        }
    }
    for c in &r.side_conditions {
        match c {
            Condition::Eq(pat, t) => {
                require(t, &bound, diags);
                pat.collect_vars(&mut bound);
            }
            Condition::Ne(a, b) => {
                require(a, &bound, diags);
                require(b, &bound, diags);
            }
            Condition::HasSort(a, _) => require(a, &bound, diags),
        }
    }
    require(&r.rhs, &bound, diags);
    for b in r.entity_writes.iter().chain(&r.emitted) {
        require(&b.term, &bound, diags);
    }
}

/// Entity classes at their use sites, entity defaults, and sort names in
/// typed meta-variables and sort conditions.
pub fn check_declarations(spec: &CbsSpec, table: &SymbolTable) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for e in &spec.entity_decls {
        let needs_default = matches!(e.class, EntityClass::Contextual | EntityClass::Mutable);
        match (&e.default, needs_default) {
            (None, true) => diags.push(Diagnostic::error(
                Category::BadDefault,
                e.span.clone(),
                format!("{} entity `{}` needs a default value", e.class.as_str(), e.name),
            )),
            (Some(_), false) => diags.push(Diagnostic::error(
                Category::BadDefault,
                e.span.clone(),
                format!("{} entity `{}` cannot have a default value", e.class.as_str(), e.name),
            )),
            (Some(d), true) => {
                let mut pure = d.is_ground();
                d.for_each_apply(&mut |n, _| match table.resolve(n) {
                    Some(Resolved::Funcon(f)) if !f.builtin => pure = false,
                    _ => {}
                });
                if !pure {
                    diags.push(Diagnostic::error(
                        Category::BadDefault,
                        e.span.clone(),
                        format!(
                            "default of `{}` must be built from values, constructors and builtins",
                            e.name
                        ),
                    ));
                }
            }
            (None, false) => {}
        }
    }
    for f in &spec.funcon_defs {
        for r in &f.rules {
            let span = &r.span;
            let mut use_entity =
                |b: &EntityBinding, allowed: &[EntityClass], role: &str| match table.entities.get(&b.entity) {
                    None => diags.push(Diagnostic::error(
                        Category::UnknownName,
                        span.clone(),
                        format!("unknown entity `{}`", b.entity),
                    )),
                    Some(e) if !allowed.contains(&e.class) => diags.push(Diagnostic::error(
                        Category::UnknownName,
                        span.clone(),
                        format!("`{}` is a {} entity and cannot be {role}", b.entity, e.class.as_str()),
                    )),
                    Some(_) => {}
                };
            use EntityClass::*;
            for b in &r.context_reads {
                use_entity(b, &[Contextual], "read before `|-`");
            }
            for b in r.state_reads.iter().chain(&r.entity_writes) {
                use_entity(b, &[Mutable], "threaded through a configuration");
            }
            for b in &r.emitted {
                use_entity(b, &[Control, Output], "emitted");
            }
            for p in &r.premises {
                for b in &p.ctx_overrides {
                    use_entity(b, &[Contextual], "supplied before `|-`");
                }
                for b in p.state_before.iter().chain(&p.state_after) {
                    use_entity(b, &[Mutable], "threaded through a configuration");
                }
                for b in &p.observed_signals {
                    use_entity(b, &[Control, Output], "observed");
                }
            }
            let mut sorts = Vec::new();
            for t in rule_terms(r) {
                typed_sorts(t, &mut sorts);
            }
            for c in &r.side_conditions {
                if let Condition::HasSort(_, s) = c {
                    sorts.push(s.clone());
                }
            }
            for s in sorts {
                if !table.is_known_sort(&s) {
                    diags.push(Diagnostic::error(
                        Category::UnknownSort,
                        span.clone(),
                        format!("unknown value sort `{s}`"),
                    ));
                }
            }
        }
    }
    sort_diagnostics(&mut diags);
    diags
}

fn typed_sorts(t: &Term, out: &mut Vec<Name>) {
    match t {
        Term::Var(v) => out.extend(v.sort.clone()),
        Term::Apply(_, args) => args.iter().for_each(|a| typed_sorts(a, out)),
        Term::Value(_) => {}
    }
}

/// Library hygiene warnings: unused named parameters, unused aliases, and
/// unconditional rewrite rules whose left sides may overlap.
pub fn check_hygiene(spec: &CbsSpec, table: &SymbolTable) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for f in spec.funcon_defs.iter().filter(|f| !f.builtin) {
        let mut used = BTreeSet::new();
        for r in &f.rules {
            for t in rule_terms(r) {
                t.collect_vars(&mut used);
            }
        }
        for p in &f.signature.params {
            if let Some(n) = &p.name {
                if !used.contains(n) && !is_sort_variable(n, &f.signature) {
                    diags.push(Diagnostic::warning(
                        Category::UnusedParam,
                        f.span.clone(),
                        format!("parameter `{n}` of `{}` is not used by any rule", f.name),
                    ));
                }
            }
        }
        let rewrites: Vec<&Rule> = f
            .rules
            .iter()
            .filter(|r| r.kind == RuleKind::Rewrite && r.side_conditions.is_empty())
            .collect();
        for (j, later) in rewrites.iter().enumerate() {
            if let Some(earlier) = rewrites[..j].iter().find(|e| may_overlap(&e.lhs, &later.lhs, table)) {
                diags.push(Diagnostic::warning(
                    Category::Overlap,
                    later.span.clone(),
                    format!(
                        "rule may overlap with the earlier rule at {}; the earlier one wins",
                        earlier.span
                    ),
                ));
            }
        }
    }
    let mut referenced = BTreeSet::new();
    for f in &spec.funcon_defs {
        for r in &f.rules {
            for t in rule_terms(r) {
                t.for_each_apply(&mut |n, _| {
                    referenced.insert(n.clone());
                });
            }
        }
    }
    for l in &spec.language_specs {
        for e in &l.equations {
            e.rhs.for_each_apply(&mut |n, _| {
                referenced.insert(n.clone());
            });
        }
    }
    for a in &spec.aliases {
        if table.alias_target.contains_key(&a.alias) && !referenced.contains(&a.alias) {
            diags.push(Diagnostic::warning(
                Category::UnusedAlias,
                a.span.clone(),
                format!("alias `{}` is never used", a.alias),
            ));
        }
    }
    sort_diagnostics(&mut diags);
    diags
}

/// Parameter names that only serve as sort variables (`T` in `_:=>T`).
fn is_sort_variable(n: &Name, sig: &Signature) -> bool {
    sig.params.iter().any(|p| &p.sort == n) || &sig.result_sort == n
}

/// Conservative unifiability test of two rule left sides.
pub fn may_overlap(a: &Term, b: &Term, table: &SymbolTable) -> bool {
    match (a, b) {
        (Term::Var(v), other) | (other, Term::Var(v)) => match (&v.sort, other) {
            (Some(s), Term::Value(val)) => crate::interp::value_has_sort(val, s, table).unwrap_or(true),
            (Some(_), Term::Apply(n, _)) => table.is_constructor(n),
            _ => true,
        },
        (Term::Value(x), Term::Value(y)) => x == y,
        (Term::Value(v), Term::Apply(n, args)) | (Term::Apply(n, args), Term::Value(v)) => match v {
            crate::value::Value::Constructor(c, vs) => {
                c == n
                    && vs.len() == args.len()
                    && vs
                        .iter()
                        .zip(args)
                        .all(|(x, y)| may_overlap(&Term::Value(x.clone()), y, table))
            }
            _ => !table.is_constructor(n),
        },
        (Term::Apply(n, xs), Term::Apply(m, ys)) => {
            if table.canonical(n) != table.canonical(m) {
                return !(table.is_constructor(n) && table.is_constructor(m));
            }
            args_overlap(xs, ys, table)
        }
    }
}

fn args_overlap(xs: &[Term], ys: &[Term], table: &SymbolTable) -> bool {
    let seq = |t: &Term| matches!(t, Term::Var(v) if v.seq);
    match (xs.first(), ys.first()) {
        (None, None) => true,
        (Some(x), _) if seq(x) => true,
        (_, Some(y)) if seq(y) => true,
        (Some(x), Some(y)) => may_overlap(x, y, table) && args_overlap(&xs[1..], &ys[1..], table),
        _ => false,
    }
}
