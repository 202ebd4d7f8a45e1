//! Static checks over a merged specification: name resolution, arity,
//! source dependence of rules, and conformance of translation equations to
//! the object grammar.

mod rules;
mod symbols;

use std::collections::{BTreeMap, BTreeSet};

pub use rules::{
    check_arity, check_declarations, check_hygiene, check_rule_variables, may_overlap, rule_terms, LEAF_FUNCTIONS,
};
pub use symbols::{build_symbol_table, collect_symbols, Resolved, SymbolTable};

use crate::diag::{sort_diagnostics, Category, Diagnostic};
use crate::grammar::{compile_grammar, pattern_matches_production, CompiledGrammar};
use crate::syntax::*;
use crate::term::Term;
use crate::value::Name;

/// Everything the later pipeline stages need from a checked specification.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub table: SymbolTable,
    pub grammars: BTreeMap<Name, CompiledGrammar>,
    /// Sorted by file and span.
    pub diagnostics: Vec<Diagnostic>,
}

impl Analysis {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

/// Runs every pass over `spec`.
pub fn analyze(spec: &CbsSpec) -> Analysis {
    let (table, mut diags) = collect_symbols(spec);
    diags.extend(check_arity(spec, &table));
    diags.extend(check_rule_variables(spec));
    diags.extend(check_declarations(spec, &table));
    diags.extend(check_hygiene(spec, &table));
    let mut grammars = BTreeMap::new();
    let mut seen_lang: BTreeMap<&str, &LanguageSpec> = BTreeMap::new();
    for lang in &spec.language_specs {
        if seen_lang.insert(&lang.name, lang).is_some() {
            diags.push(Diagnostic::error(
                Category::DuplicateDef,
                lang.span.clone(),
                format!("language `{}` is defined twice", lang.name),
            ));
            continue;
        }
        match compile_grammar(lang) {
            Ok(g) => {
                diags.extend(check_equation_patterns(lang, &g));
                grammars.insert(lang.name.clone(), g);
            }
            Err(ds) => diags.extend(ds),
        }
    }
    sort_diagnostics(&mut diags);
    Analysis {
        table,
        grammars,
        diagnostics: diags,
    }
}

/// Whether a pattern is a lone meta-variable of `sort`, matching any phrase.
pub fn is_catch_all(p: &SyntaxPattern, sort: &str) -> bool {
    matches!(p.items.as_slice(), [PatternItem::Var { stem, op: None, .. }] if &**stem == sort)
}

/// Equation and desugar left sides against the grammar, translation-function
/// applications on right sides, and equation coverage and overlap.
pub fn check_equation_patterns(lang: &LanguageSpec, g: &CompiledGrammar) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut decls: BTreeMap<&str, &SemanticsDecl> = BTreeMap::new();
    for d in &lang.semantics_decls {
        if LEAF_FUNCTIONS.contains(&&*d.fn_name) {
            diags.push(Diagnostic::error(
                Category::DuplicateDef,
                d.span.clone(),
                format!("`{}` is a reserved leaf translation", d.fn_name),
            ));
        } else if decls.contains_key(&*d.fn_name) {
            diags.push(Diagnostic::error(
                Category::DuplicateDef,
                d.span.clone(),
                format!("translation function `{}` is declared twice", d.fn_name),
            ));
            continue;
        }
        if !g.is_sort(&d.source_sort) {
            diags.push(Diagnostic::error(
                Category::UnknownSort,
                d.span.clone(),
                format!("language `{}` has no sort `{}`", lang.name, d.source_sort),
            ));
        }
        decls.entry(&d.fn_name).or_insert(d);
    }

    // Productions that every desugaring pass removes.
    let mut desugared = BTreeSet::new();
    for rule in &lang.desugar_rules {
        let Some(p) = g
            .productions
            .iter()
            .find(|p| !p.lexical && pattern_matches_production(&rule.lhs, p))
        else {
            diags.push(Diagnostic::error(
                Category::PatternMismatch,
                rule.span.clone(),
                format!("`{}` is not an alternative of any sort", rule.lhs),
            ));
            continue;
        };
        desugared.insert(p.id);
        if let Err(d) = g.parse_pattern(&rule.rhs, &p.sort, &rule.span) {
            diags.push(d);
        }
        for (v, stem, op) in rule.rhs.vars() {
            let bound = rule.lhs.vars().find(|(n, _, _)| n == &v);
            if let Some((_, s2, op2)) = bound {
                if s2 != stem || op2 != op {
                    diags.push(Diagnostic::error(
                        Category::PatternMismatch,
                        rule.span.clone(),
                        format!("meta-variable `{v}` is used with a different sort on the right side"),
                    ));
                }
            }
        }
    }

    // Productions covered by each translation function, with the equation that covers them.
    let mut covered: BTreeMap<&str, BTreeMap<usize, &TranslationEquation>> = BTreeMap::new();
    let mut catch_all: BTreeMap<&str, &TranslationEquation> = BTreeMap::new();
    for eq in &lang.equations {
        let Some(decl) = decls.get(&*eq.fn_name) else {
            diags.push(Diagnostic::error(
                Category::UnknownName,
                eq.span.clone(),
                format!("no translation function `{}` is declared", eq.fn_name),
            ));
            continue;
        };
        let sort = &decl.source_sort;
        check_translation_calls(eq, &decls, g, &mut diags);
        if let Some(prev) = catch_all.get(&*eq.fn_name) {
            diags.push(overlap(eq, prev));
            continue;
        }
        if is_catch_all(&eq.lhs, sort) {
            catch_all.insert(&eq.fn_name, eq);
            continue;
        }
        let matching: Vec<&Production> = g
            .alternatives(sort)
            .filter(|p| !p.lexical && pattern_matches_production(&eq.lhs, p))
            .collect();
        let Some(p) = matching.first() else {
            diags.push(Diagnostic::error(
                Category::PatternMismatch,
                eq.span.clone(),
                format!("`{}` matches no alternative of {sort}", eq.lhs),
            ));
            continue;
        };
        let by_prod = covered.entry(&eq.fn_name).or_default();
        match by_prod.get(&p.id) {
            Some(prev) => diags.push(overlap(eq, prev)),
            None => {
                by_prod.insert(p.id, eq);
            }
        }
    }

    for (name, decl) in &decls {
        if catch_all.contains_key(name) || !g.is_sort(&decl.source_sort) || g.is_lexical(&decl.source_sort) {
            continue;
        }
        let by_prod = covered.get(name);
        for p in g.alternatives(&decl.source_sort) {
            if desugared.contains(&p.id) || by_prod.is_some_and(|m| m.contains_key(&p.id)) {
                continue;
            }
            diags.push(Diagnostic::warning(
                Category::NoEquation,
                decl.span.clone(),
                format!("`{name}` has no equation for `{}`", production_pattern(p)),
            ));
        }
    }
    sort_diagnostics(&mut diags);
    diags
}

fn overlap(eq: &TranslationEquation, prev: &TranslationEquation) -> Diagnostic {
    Diagnostic::warning(
        Category::Overlap,
        eq.span.clone(),
        format!(
            "equation `{}({})` is shadowed by the earlier equation at line {}",
            eq.fn_name, eq.lhs, prev.span.start_line
        ),
    )
}

fn production_pattern(p: &Production) -> String {
    p.symbols.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// Translation-function arguments must be meta-variables of the function's
/// source sort (or of a lexical sort for leaf translations); syntax
/// meta-variables may not appear untranslated.
fn check_translation_calls(
    eq: &TranslationEquation,
    decls: &BTreeMap<&str, &SemanticsDecl>,
    g: &CompiledGrammar,
    diags: &mut Vec<Diagnostic>,
) {
    let stems: BTreeMap<&str, &Name> = eq.lhs.vars().map(|(n, s, _)| (&**n, s)).collect();
    let mut err = |msg: String| diags.push(Diagnostic::error(Category::PatternMismatch, eq.span.clone(), msg));
    fn walk(
        t: &Term,
        under_fn: bool,
        decls: &BTreeMap<&str, &SemanticsDecl>,
        stems: &BTreeMap<&str, &Name>,
        g: &CompiledGrammar,
        err: &mut dyn FnMut(String),
    ) {
        match t {
            Term::Value(_) => {}
            Term::Var(v) => {
                if !under_fn && stems.contains_key(&*v.name) {
                    err(format!(
                        "syntax meta-variable `{}` must be passed to a translation function",
                        v.name
                    ));
                }
            }
            Term::Apply(f, args) => {
                let leaf = LEAF_FUNCTIONS.contains(&&**f);
                let decl = decls.get(&**f);
                if leaf || decl.is_some() {
                    if let [Term::Var(v)] = args.as_slice() {
                        if let Some(stem) = stems.get(&*v.name) {
                            if leaf && !g.is_lexical(stem) {
                                err(format!(
                                    "`{f}` translates lexical phrases, but `{}` is a {stem}",
                                    v.name
                                ));
                            }
                            if let Some(d) = decl {
                                if ***stem != *d.source_sort {
                                    err(format!(
                                        "`{f}` translates {} phrases, but `{}` is a {stem}",
                                        d.source_sort, v.name
                                    ));
                                }
                            }
                        }
                    }
                    return;
                }
                for a in args {
                    walk(a, false, decls, stems, g, err);
                }
            }
        }
    }
    walk(&eq.rhs, false, decls, &stems, g, &mut err);
}
