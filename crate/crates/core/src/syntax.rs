//! Abstract syntax of the meta-language: funcon definitions, entity and
//! datatype declarations, aliases and language specifications.

use std::collections::BTreeSet;
use std::fmt;

use crate::span::SourceSpan;
use crate::term::Term;
use crate::value::Name;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CbsSpec {
    pub funcon_defs: Vec<FunconDef>,
    pub aliases: Vec<AliasDef>,
    pub entity_decls: Vec<EntityDecl>,
    pub datatype_defs: Vec<DatatypeDef>,
    pub language_specs: Vec<LanguageSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunconDef {
    pub name: Name,
    pub signature: Signature,
    pub rules: Vec<Rule>,
    pub builtin: bool,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub params: Vec<Param>,
    pub result_sort: Name,
    /// `: =>S` rather than `: S`.
    pub result_computes: bool,
    /// `S?`: the funcon may compute no result.
    pub result_optional: bool,
}

impl Signature {
    /// Number of non-variadic parameters.
    pub fn fixed_arity(&self) -> usize {
        self.params.iter().filter(|p| !p.variadic).count()
    }

    pub fn is_variadic(&self) -> bool {
        self.params.last().is_some_and(|p| p.variadic)
    }

    pub fn accepts(&self, count: usize) -> bool {
        if self.is_variadic() {
            count >= self.fixed_arity()
        } else {
            count == self.fixed_arity()
        }
    }

    /// The parameter governing argument position `index`, if any.
    pub fn param_for(&self, index: usize) -> Option<&Param> {
        match self.params.get(index) {
            Some(p) if !p.variadic => Some(p),
            _ => self
                .params
                .last()
                .filter(|p| p.variadic && index + 1 >= self.params.len()),
        }
    }

    pub fn is_strict_at(&self, index: usize) -> bool {
        self.param_for(index).is_some_and(|p| p.strict)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    /// `None` for `_`.
    pub name: Option<Name>,
    pub sort: Name,
    /// A value sort `S` (pre-evaluated); `=>S` is lazy.
    pub strict: bool,
    pub variadic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Rewrite,
    Step,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arrow {
    /// `~>`
    Rewrite,
    /// `--->`, or a labelled `--E(..)->`
    Step,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityBinding {
    pub entity: Name,
    pub term: Term,
}

impl EntityBinding {
    pub fn new(entity: Name, term: Term) -> Self {
        EntityBinding { entity, term }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `P == T`: `T` is evaluated, `P` is matched against it (and may bind).
    Eq(Term, Term),
    /// `T1 != T2`
    Ne(Term, Term),
    /// `T : sort`
    HasSort(Term, Name),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub subject: Name,
    pub result: Term,
    pub arrow: Arrow,
    /// Contextual entities supplied to the sub-step, before `|-`.
    pub ctx_overrides: Vec<EntityBinding>,
    /// Mutable entities on the left configuration (patterns over the current state).
    pub state_before: Vec<EntityBinding>,
    /// Mutable entities on the right configuration (patterns over the sub-step's state).
    pub state_after: Vec<EntityBinding>,
    pub observed_signals: Vec<EntityBinding>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub kind: RuleKind,
    pub arrow: Arrow,
    pub lhs: Term,
    pub rhs: Term,
    pub premises: Vec<Premise>,
    /// Contextual entities read before `|-`.
    pub context_reads: Vec<EntityBinding>,
    /// Mutable entities read in the left configuration.
    pub state_reads: Vec<EntityBinding>,
    pub entity_writes: Vec<EntityBinding>,
    pub emitted: Vec<EntityBinding>,
    pub side_conditions: Vec<Condition>,
    pub span: SourceSpan,
}

impl Rule {
    pub fn entity_reads(&self) -> impl Iterator<Item = &EntityBinding> {
        self.context_reads.iter().chain(self.state_reads.iter())
    }

    pub fn head(&self) -> Option<&Name> {
        match &self.lhs {
            Term::Apply(n, _) => Some(n),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityClass {
    Contextual,
    Mutable,
    Control,
    Output,
}

impl EntityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityClass::Contextual => "contextual",
            EntityClass::Mutable => "mutable",
            EntityClass::Control => "control",
            EntityClass::Output => "output",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityDecl {
    pub name: Name,
    pub class: EntityClass,
    pub value_sort: Name,
    pub default: Option<Term>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructorDef {
    pub name: Name,
    pub arg_sorts: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatatypeDef {
    pub sort: Name,
    pub constructors: Vec<ConstructorDef>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AliasDef {
    pub alias: Name,
    pub target: Name,
    pub span: SourceSpan,
}

// ---------------------------------------------------------------------------
// Language specifications

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Assoc {
    Left,
    Right,
    NonAssoc,
}

impl Assoc {
    pub fn as_str(self) -> &'static str {
        match self {
            Assoc::Left => "left",
            Assoc::Right => "right",
            Assoc::NonAssoc => "non-assoc",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProdAttrs {
    pub assoc: Option<Assoc>,
    pub prio: Option<i64>,
    pub name: Option<Name>,
}

impl ProdAttrs {
    pub fn is_empty(&self) -> bool {
        self.assoc.is_none() && self.prio.is_none() && self.name.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharClass {
    pub negated: bool,
    pub ranges: Vec<(char, char)>,
}

impl CharClass {
    pub fn contains(&self, c: char) -> bool {
        let inside = self.ranges.iter().any(|&(lo, hi)| lo <= c && c <= hi);
        inside != self.negated
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Terminal(String),
    Nonterm(Name),
    CharClass(CharClass),
    Star(Box<Symbol>),
    Plus(Box<Symbol>),
    Opt(Box<Symbol>),
}

impl Symbol {
    pub fn is_regular(&self) -> bool {
        matches!(self, Symbol::Star(_) | Symbol::Plus(_) | Symbol::Opt(_))
    }

    /// Positions that become children of a tree node.
    pub fn is_child(&self) -> bool {
        matches!(self, Symbol::Nonterm(_)) || self.is_regular()
    }

    /// Every sort referenced by the symbol.
    pub fn sorts(&self) -> Vec<&Name> {
        match self {
            Symbol::Nonterm(n) => vec![n],
            Symbol::Star(s) | Symbol::Plus(s) | Symbol::Opt(s) => s.sorts(),
            _ => vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    /// Index within its language, in source order.
    pub id: usize,
    pub sort: Name,
    pub symbols: Vec<Symbol>,
    pub attrs: ProdAttrs,
    pub lexical: bool,
    pub span: SourceSpan,
}

/// `Priority a > b > c`, naming productions through their `name` attribute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityDecl {
    pub chain: Vec<Name>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemanticsDecl {
    pub fn_name: Name,
    pub source_sort: Name,
    pub result_sort: Name,
    pub result_computes: bool,
    pub span: SourceSpan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegOp {
    Star,
    Plus,
    Opt,
}

impl RegOp {
    pub fn as_str(self) -> &'static str {
        match self {
            RegOp::Star => "*",
            RegOp::Plus => "+",
            RegOp::Opt => "?",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PatternItem {
    Literal(String),
    /// `Exp1`, `Stmt*`: stem `Exp`/`Stmt` names the sort.
    Var {
        name: Name,
        stem: Name,
        op: Option<RegOp>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SyntaxPattern {
    pub items: Vec<PatternItem>,
}

impl SyntaxPattern {
    pub fn vars(&self) -> impl Iterator<Item = (&Name, &Name, Option<RegOp>)> {
        self.items.iter().filter_map(|i| match i {
            PatternItem::Var { name, stem, op } => Some((name, stem, *op)),
            PatternItem::Literal(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationEquation {
    pub fn_name: Name,
    pub lhs: SyntaxPattern,
    pub rhs: Term,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesugarRule {
    pub lhs: SyntaxPattern,
    pub rhs: SyntaxPattern,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageSpec {
    pub name: Name,
    pub productions: Vec<Production>,
    pub priorities: Vec<PriorityDecl>,
    pub lexical_sorts: BTreeSet<Name>,
    pub semantics_decls: Vec<SemanticsDecl>,
    pub equations: Vec<TranslationEquation>,
    pub desugar_rules: Vec<DesugarRule>,
    pub span: SourceSpan,
}

/// Sort name reserved for layout productions.
pub const LAYOUT_SORT: &str = "LAYOUT";

impl LanguageSpec {
    pub fn new(name: Name, span: SourceSpan) -> Self {
        LanguageSpec {
            name,
            productions: Vec::new(),
            priorities: Vec::new(),
            lexical_sorts: BTreeSet::new(),
            semantics_decls: Vec::new(),
            equations: Vec::new(),
            desugar_rules: Vec::new(),
            span,
        }
    }

    pub fn layout(&self) -> impl Iterator<Item = &Production> {
        self.productions.iter().filter(|p| &*p.sort == LAYOUT_SORT)
    }

    pub fn sorts(&self) -> BTreeSet<Name> {
        self.productions.iter().map(|p| p.sort.clone()).collect()
    }

    pub fn semantics(&self, fn_name: &str) -> Option<&SemanticsDecl> {
        self.semantics_decls.iter().find(|d| &*d.fn_name == fn_name)
    }

    /// The first declared translation function over `sort`.
    pub fn semantics_for_sort(&self, sort: &str) -> Option<&SemanticsDecl> {
        self.semantics_decls.iter().find(|d| &*d.source_sort == sort)
    }

    /// The sort of the first context-free production; the default start sort.
    pub fn default_start(&self) -> Option<&Name> {
        self.productions.iter().find(|p| !p.lexical).map(|p| &p.sort)
    }
}

/// Concatenates specifications, preserving per-file order then input order.
pub fn merge_specs<I>(specs: I) -> CbsSpec
where
    I: IntoIterator<Item = CbsSpec>,
{
    let mut out = CbsSpec::default();
    for s in specs {
        out.funcon_defs.extend(s.funcon_defs);
        out.aliases.extend(s.aliases);
        out.entity_decls.extend(s.entity_decls);
        out.datatype_defs.extend(s.datatype_defs);
        out.language_specs.extend(s.language_specs);
    }
    out
}

impl CbsSpec {
    pub fn is_empty(&self) -> bool {
        self.funcon_defs.is_empty()
            && self.aliases.is_empty()
            && self.entity_decls.is_empty()
            && self.datatype_defs.is_empty()
            && self.language_specs.is_empty()
    }

    pub fn language(&self, name: &str) -> Option<&LanguageSpec> {
        self.language_specs.iter().find(|l| &*l.name == name)
    }

    /// A copy with every span replaced by the dummy span, for structural comparison.
    pub fn without_spans(&self) -> CbsSpec {
        let mut s = self.clone();
        let d = SourceSpan::dummy;
        for f in &mut s.funcon_defs {
            f.span = d();
            for r in &mut f.rules {
                r.span = d();
            }
        }
        for a in &mut s.aliases {
            a.span = d();
        }
        for e in &mut s.entity_decls {
            e.span = d();
        }
        for t in &mut s.datatype_defs {
            t.span = d();
        }
        for l in &mut s.language_specs {
            l.span = d();
            for p in &mut l.productions {
                p.span = d();
            }
            for p in &mut l.priorities {
                p.span = d();
            }
            for p in &mut l.semantics_decls {
                p.span = d();
            }
            for p in &mut l.equations {
                p.span = d();
            }
            for p in &mut l.desugar_rules {
                p.span = d();
            }
        }
        s
    }
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn esc(f: &mut fmt::Formatter<'_>, c: char) -> fmt::Result {
            match c {
                '\n' => f.write_str("\\n"),
                '\t' => f.write_str("\\t"),
                '\r' => f.write_str("\\r"),
                ' ' => f.write_str("\\ "),
                '\\' | ']' | '[' | '-' | '^' => write!(f, "\\{c}"),
                c => write!(f, "{c}"),
            }
        }
        f.write_str("[")?;
        if self.negated {
            f.write_str("^")?;
        }
        for &(lo, hi) in &self.ranges {
            esc(f, lo)?;
            if hi != lo {
                f.write_str("-")?;
                esc(f, hi)?;
            }
        }
        f.write_str("]")
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(t) => crate::value::write_quoted(f, t),
            Symbol::Nonterm(n) => f.write_str(n),
            Symbol::CharClass(c) => write!(f, "{c}"),
            Symbol::Star(s) => write!(f, "{s}*"),
            Symbol::Plus(s) => write!(f, "{s}+"),
            Symbol::Opt(s) => write!(f, "{s}?"),
        }
    }
}

impl fmt::Display for PatternItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternItem::Literal(t) => crate::value::write_quoted(f, t),
            PatternItem::Var { name, op, .. } => {
                f.write_str(name)?;
                if let Some(op) = op {
                    f.write_str(op.as_str())?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for SyntaxPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn sig(params: &[(bool, bool)]) -> Signature {
        Signature {
            params: params
                .iter()
                .map(|&(strict, variadic)| Param {
                    name: None,
                    sort: Arc::from("values"),
                    strict,
                    variadic,
                })
                .collect(),
            result_sort: Arc::from("values"),
            result_computes: true,
            result_optional: false,
        }
    }

    #[test]
    fn arity_of_fixed_signature() {
        let s = sig(&[(true, false), (false, false), (false, false)]);
        assert!(s.accepts(3));
        assert!(!s.accepts(2));
        assert!(s.is_strict_at(0));
        assert!(!s.is_strict_at(1));
        assert!(s.param_for(3).is_none());
    }

    #[test]
    fn variadic_lower_bound() {
        let s = sig(&[(false, true)]);
        assert!(s.accepts(0));
        assert!(s.accepts(7));
        assert!(!s.is_strict_at(5));
        let s = sig(&[(true, false), (true, true)]);
        assert!(!s.accepts(0));
        assert!(s.accepts(1));
        assert!(s.is_strict_at(4));
    }

    #[test]
    fn merge_of_nothing_is_empty() {
        assert!(merge_specs(Vec::new()).is_empty());
    }

    #[test]
    fn char_class_display_escapes() {
        let c = CharClass {
            negated: true,
            ranges: vec![('\n', '\n'), ('a', 'z'), ('-', '-')],
        };
        assert_eq!(c.to_string(), "[^\\na-z\\-]");
        assert!(c.contains('A'));
        assert!(!c.contains('q'));
    }
}
