//! Object-language grammars: compilation of a language's productions into a
//! scannerless Earley grammar, parsing, and disambiguation.

mod ast;
mod earley;
mod forest;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

pub use ast::{ObjectAst, ObjectNode, ParsedProgram};
pub use earley::InputSym;

use crate::diag::{sort_diagnostics, Category, Diagnostic};
use crate::span::SourceSpan;
use crate::syntax::*;
use crate::value::Name;

pub(crate) type NtId = usize;
pub(crate) type RuleId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum GSym {
    Lit(Vec<char>),
    Class(CharClass),
    Nt(NtId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Origin {
    /// A user production; layout is interleaved when it is context-free.
    Prod(usize),
    /// `L ::= ε | L LAYOUT`
    Layout,
    Star,
    Plus,
    Opt,
    /// `Start ::= L sort L`
    Start,
    /// One of the built-in layout alternatives used when a language declares none.
    DefaultLayout,
}

#[derive(Clone, Debug)]
pub(crate) struct GRule {
    pub lhs: NtId,
    pub rhs: Vec<GSym>,
    pub origin: Origin,
    /// Right side interleaves the layout nonterminal between symbols.
    pub cf: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum NtKind {
    Sort { sort: Name, lexical: bool },
    Layout,
    Aux { symbol: Symbol, cf: bool },
    Start(Name),
}

#[derive(Clone, Debug)]
pub(crate) struct NtInfo {
    pub kind: NtKind,
    pub rules: Vec<RuleId>,
    pub nullable: bool,
}

impl NtInfo {
    /// Opaque nonterminals become single leaves: lexical sorts and layout.
    pub fn opaque(&self) -> bool {
        matches!(self.kind, NtKind::Sort { lexical: true, .. } | NtKind::Layout)
    }
}

/// A validated, disambiguation-ready grammar of one language.
#[derive(Clone, Debug)]
pub struct CompiledGrammar {
    pub language: Name,
    pub productions: Vec<Production>,
    pub(crate) nts: Vec<NtInfo>,
    pub(crate) rules: Vec<GRule>,
    pub(crate) sort_nt: BTreeMap<Name, NtId>,
    pub(crate) start_nt: BTreeMap<Name, NtId>,
    /// Aux nonterminal for a regular-operator symbol in context-free context.
    pub(crate) aux_cf: HashMap<Symbol, NtId>,
    /// `(higher, lower)` production pairs: lower may not occur at an edge of higher.
    pub(crate) priority: BTreeSet<(usize, usize)>,
    /// Alphanumeric terminals of context-free productions.
    pub(crate) keywords: BTreeSet<String>,
}

impl CompiledGrammar {
    pub fn production(&self, id: usize) -> &Production {
        &self.productions[id]
    }

    /// Context-free alternatives of `sort`, in source order.
    pub fn alternatives<'a>(&'a self, sort: &'a str) -> impl Iterator<Item = &'a Production> + 'a {
        self.productions.iter().filter(move |p| &*p.sort == sort)
    }

    pub fn is_sort(&self, sort: &str) -> bool {
        self.sort_nt.contains_key(sort)
    }

    pub fn is_lexical(&self, sort: &str) -> bool {
        self.sort_nt
            .get(sort)
            .is_some_and(|&nt| matches!(self.nts[nt].kind, NtKind::Sort { lexical: true, .. }))
    }

    /// Sorts defined by context-free productions.
    pub fn cf_sorts(&self) -> Vec<Name> {
        self.sort_nt
            .iter()
            .filter(|(_, &nt)| matches!(self.nts[nt].kind, NtKind::Sort { lexical: false, .. }))
            .map(|(s, _)| s.clone())
            .collect()
    }

    /// Whether production `higher` has priority over `lower`.
    pub fn has_priority(&self, higher: usize, lower: usize) -> bool {
        self.priority.contains(&(higher, lower))
    }

    /// Whether `child` may not be the `edge`-most (leftmost or rightmost)
    /// child of `parent` under the priority and associativity filters.
    pub fn forbids(&self, parent: usize, child: usize, leftmost: bool, rightmost: bool) -> bool {
        if (leftmost || rightmost) && self.has_priority(parent, child) {
            return true;
        }
        let p = &self.productions[parent];
        let q = &self.productions[child];
        let same_group =
            parent == child || (p.attrs.prio.is_some() && p.attrs.prio == q.attrs.prio && q.attrs.assoc.is_some());
        if !same_group {
            return false;
        }
        match p.attrs.assoc {
            Some(Assoc::Left) => rightmost,
            Some(Assoc::Right) => leftmost,
            Some(Assoc::NonAssoc) => leftmost || rightmost,
            None => false,
        }
    }

    /// Parses program text as `start`.
    pub fn parse_program(&self, text: &str, start: &str, file_id: &str) -> Result<ParsedProgram, Vec<Diagnostic>> {
        let file: Arc<str> = Arc::from(file_id);
        let Some(&start_nt) = self.start_nt.get(start) else {
            return Err(vec![Diagnostic::error(
                Category::UnknownSort,
                SourceSpan::point(file, 1, 1),
                format!("language `{}` has no sort `{start}`", self.language),
            )]);
        };
        let input: Vec<InputSym> = text.chars().map(InputSym::Char).collect();
        let ctx = forest::SourceCtx::new(text, file);
        forest::parse(self, &input, start_nt, &ctx)
    }

    /// Parses a sequence of pattern items (terminals and meta-variables) as
    /// `sort`, producing a tree whose meta-variables are holes.
    pub fn parse_pattern(
        &self,
        pattern: &SyntaxPattern,
        sort: &str,
        span: &SourceSpan,
    ) -> Result<ObjectAst, Diagnostic> {
        let fail = |msg: String| Diagnostic::error(Category::PatternMismatch, span.clone(), msg);
        let Some(&start_nt) = self.start_nt.get(sort) else {
            return Err(fail(format!("no sort `{sort}` in language `{}`", self.language)));
        };
        let mut input = Vec::new();
        for (i, item) in pattern.items.iter().enumerate() {
            if i > 0 {
                input.push(InputSym::Char(' '));
            }
            match item {
                PatternItem::Literal(s) => input.extend(s.chars().map(InputSym::Char)),
                PatternItem::Var { name, stem, op } => {
                    let target = match op {
                        None => self.sort_nt.get(stem).copied(),
                        Some(op) => {
                            let inner = Box::new(Symbol::Nonterm(stem.clone()));
                            let sym = match op {
                                RegOp::Star => Symbol::Star(inner),
                                RegOp::Plus => Symbol::Plus(inner),
                                RegOp::Opt => Symbol::Opt(inner),
                            };
                            self.aux_cf.get(&sym).copied()
                        }
                    };
                    let Some(nt) = target else {
                        return Err(fail(format!("meta-variable `{item}` has no matching sort")));
                    };
                    input.push(InputSym::Hole { nt, var: name.clone() });
                }
            }
        }
        let ctx = forest::SourceCtx::pattern(span.clone());
        match forest::parse(self, &input, start_nt, &ctx) {
            Ok(p) => Ok(p.ast),
            Err(d) => Err(fail(format!(
                "`{pattern}` is not a phrase of sort {sort}: {}",
                d.first().map(|d| d.message.as_str()).unwrap_or("no parse")
            ))),
        }
    }
}

/// Whether a flat pattern is exactly the alternative `p`: terminals verbatim
/// and meta-variables of the right sort at nonterminal positions.
pub fn pattern_matches_production(pattern: &SyntaxPattern, p: &Production) -> bool {
    pattern.items.len() == p.symbols.len()
        && pattern
            .items
            .iter()
            .zip(&p.symbols)
            .all(|(item, sym)| match (item, sym) {
                (PatternItem::Literal(a), Symbol::Terminal(b)) => a == b,
                (PatternItem::Var { stem, op, .. }, sym) => {
                    let (inner, sym_op) = match sym {
                        Symbol::Star(s) => (&**s, Some(RegOp::Star)),
                        Symbol::Plus(s) => (&**s, Some(RegOp::Plus)),
                        Symbol::Opt(s) => (&**s, Some(RegOp::Opt)),
                        s => (s, None),
                    };
                    *op == sym_op && matches!(inner, Symbol::Nonterm(n) if n == stem)
                }
                _ => false,
            })
}

fn default_layout() -> Vec<Vec<Symbol>> {
    vec![
        vec![Symbol::CharClass(CharClass {
            negated: false,
            ranges: vec![(' ', ' '), ('\t', '\t'), ('\n', '\n'), ('\r', '\r')],
        })],
        vec![
            Symbol::Terminal("//".into()),
            Symbol::Star(Box::new(Symbol::CharClass(CharClass {
                negated: true,
                ranges: vec![('\n', '\n')],
            }))),
        ],
    ]
}

fn is_word(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Builder {
    nts: Vec<NtInfo>,
    rules: Vec<GRule>,
    sort_nt: BTreeMap<Name, NtId>,
    aux: HashMap<(Symbol, bool), NtId>,
    layout_nt: NtId,
}

impl Builder {
    fn nt(&mut self, kind: NtKind) -> NtId {
        self.nts.push(NtInfo {
            kind,
            rules: Vec::new(),
            nullable: false,
        });
        self.nts.len() - 1
    }

    fn rule(&mut self, lhs: NtId, rhs: Vec<GSym>, origin: Origin, cf: bool) {
        let id = self.rules.len();
        self.rules.push(GRule { lhs, rhs, origin, cf });
        self.nts[lhs].rules.push(id);
    }

    /// Right side for `syms`, with layout between symbols in CF context.
    fn rhs(&mut self, syms: &[Symbol], cf: bool) -> Vec<GSym> {
        let mut out = Vec::new();
        for (i, s) in syms.iter().enumerate() {
            if cf && i > 0 {
                out.push(GSym::Nt(self.layout_nt));
            }
            out.push(self.sym(s, cf));
        }
        out
    }

    fn sym(&mut self, s: &Symbol, cf: bool) -> GSym {
        match s {
            Symbol::Terminal(t) => GSym::Lit(t.chars().collect()),
            Symbol::CharClass(c) => GSym::Class(c.clone()),
            Symbol::Nonterm(n) => GSym::Nt(self.sort_nt[n]),
            Symbol::Star(_) | Symbol::Plus(_) | Symbol::Opt(_) => GSym::Nt(self.aux(s, cf)),
        }
    }

    fn aux(&mut self, s: &Symbol, cf: bool) -> NtId {
        if let Some(&nt) = self.aux.get(&(s.clone(), cf)) {
            return nt;
        }
        let nt = self.nt(NtKind::Aux { symbol: s.clone(), cf });
        self.aux.insert((s.clone(), cf), nt);
        match s {
            Symbol::Star(inner) => {
                let plus = self.aux(&Symbol::Plus(inner.clone()), cf);
                self.rule(nt, vec![], Origin::Star, cf);
                self.rule(nt, vec![GSym::Nt(plus)], Origin::Star, cf);
            }
            Symbol::Plus(inner) => {
                let elem = self.sym(inner, cf);
                self.rule(nt, vec![elem.clone()], Origin::Plus, cf);
                let mut rhs = vec![GSym::Nt(nt)];
                if cf {
                    rhs.push(GSym::Nt(self.layout_nt));
                }
                rhs.push(elem);
                self.rule(nt, rhs, Origin::Plus, cf);
            }
            Symbol::Opt(inner) => {
                let elem = self.sym(inner, cf);
                self.rule(nt, vec![], Origin::Opt, cf);
                self.rule(nt, vec![elem], Origin::Opt, cf);
            }
            _ => unreachable!("aux nonterminals are only made for regular operators"),
        }
        nt
    }
}

fn check_production(
    p: &Production,
    lexical_sorts: &BTreeSet<Name>,
    defined: &BTreeSet<Name>,
    diags: &mut Vec<Diagnostic>,
) {
    fn walk(
        s: &Symbol,
        p: &Production,
        depth: usize,
        lexical_sorts: &BTreeSet<Name>,
        defined: &BTreeSet<Name>,
        diags: &mut Vec<Diagnostic>,
    ) {
        let bad = |msg: String, diags: &mut Vec<Diagnostic>| {
            diags.push(Diagnostic::error(Category::BadProduction, p.span.clone(), msg));
        };
        match s {
            Symbol::Nonterm(n) => {
                if !defined.contains(n) {
                    diags.push(Diagnostic::error(
                        Category::UnknownSort,
                        p.span.clone(),
                        format!("sort `{n}` has no productions"),
                    ));
                } else if p.lexical && !lexical_sorts.contains(n) {
                    bad(
                        format!("lexical sort `{}` refers to context-free sort `{n}`", p.sort),
                        diags,
                    );
                }
            }
            Symbol::Terminal(_) => {
                if !p.lexical && depth > 0 {
                    bad(
                        "regular operators over terminals are only allowed in lexical productions".into(),
                        diags,
                    );
                }
            }
            Symbol::CharClass(_) => {
                if !p.lexical {
                    bad(
                        "character classes are only allowed in lexical productions".into(),
                        diags,
                    );
                }
            }
            Symbol::Star(i) | Symbol::Plus(i) | Symbol::Opt(i) => {
                if !p.lexical && depth > 0 {
                    bad(
                        "nested regular operators are only allowed in lexical productions".into(),
                        diags,
                    );
                }
                walk(i, p, depth + 1, lexical_sorts, defined, diags);
            }
        }
    }
    for s in &p.symbols {
        walk(s, p, 0, lexical_sorts, defined, diags);
    }
}

/// Validates a language's grammar and builds its parser.
pub fn compile_grammar(lang: &LanguageSpec) -> Result<CompiledGrammar, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let defined: BTreeSet<Name> = lang.productions.iter().map(|p| p.sort.clone()).collect();
    let mut sort_kind: BTreeMap<Name, bool> = BTreeMap::new();
    for p in &lang.productions {
        match sort_kind.get(&p.sort) {
            Some(&lex) if lex != p.lexical => diags.push(Diagnostic::error(
                Category::BadProduction,
                p.span.clone(),
                format!("sort `{}` has both lexical and context-free productions", p.sort),
            )),
            _ => {
                sort_kind.insert(p.sort.clone(), p.lexical);
            }
        }
    }
    let lexical_sorts: BTreeSet<Name> = sort_kind.iter().filter(|(_, &l)| l).map(|(s, _)| s.clone()).collect();
    for p in &lang.productions {
        check_production(p, &lexical_sorts, &defined, &mut diags);
    }

    let priority = priority_relation(lang, &mut diags);
    if diags.iter().any(Diagnostic::is_error) {
        sort_diagnostics(&mut diags);
        return Err(diags);
    }

    let mut b = Builder {
        nts: Vec::new(),
        rules: Vec::new(),
        sort_nt: BTreeMap::new(),
        aux: HashMap::new(),
        layout_nt: 0,
    };
    b.layout_nt = b.nt(NtKind::Layout);
    for (sort, &lexical) in &sort_kind {
        let nt = b.nt(NtKind::Sort {
            sort: sort.clone(),
            lexical,
        });
        b.sort_nt.insert(sort.clone(), nt);
    }
    let layout_sort = match b.sort_nt.get(LAYOUT_SORT) {
        Some(&nt) => nt,
        None => {
            let nt = b.nt(NtKind::Sort {
                sort: Arc::from(LAYOUT_SORT),
                lexical: true,
            });
            for syms in default_layout() {
                let rhs = b.rhs(&syms, false);
                b.rule(nt, rhs, Origin::DefaultLayout, false);
            }
            nt
        }
    };
    let l = b.layout_nt;
    b.rule(l, vec![], Origin::Layout, false);
    b.rule(l, vec![GSym::Nt(l), GSym::Nt(layout_sort)], Origin::Layout, false);
    for p in &lang.productions {
        let nt = b.sort_nt[&p.sort];
        let rhs = b.rhs(&p.symbols, !p.lexical);
        b.rule(nt, rhs, Origin::Prod(p.id), !p.lexical);
    }
    let mut start_nt = BTreeMap::new();
    for (sort, &nt) in b.sort_nt.clone().iter() {
        let s = b.nt(NtKind::Start(sort.clone()));
        b.rule(s, vec![GSym::Nt(l), GSym::Nt(nt), GSym::Nt(l)], Origin::Start, true);
        start_nt.insert(sort.clone(), s);
    }
    compute_nullable(&mut b.nts, &b.rules);

    let keywords = lang
        .productions
        .iter()
        .filter(|p| !p.lexical)
        .flat_map(|p| p.symbols.iter())
        .filter_map(|s| match s {
            Symbol::Terminal(t) if is_word(t) => Some(t.clone()),
            _ => None,
        })
        .collect();
    let aux_cf = b
        .aux
        .iter()
        .filter(|((_, cf), _)| *cf)
        .map(|((s, _), &nt)| (s.clone(), nt))
        .collect();
    Ok(CompiledGrammar {
        language: lang.name.clone(),
        productions: lang.productions.clone(),
        nts: b.nts,
        rules: b.rules,
        sort_nt: b.sort_nt,
        start_nt,
        aux_cf,
        priority,
        keywords,
    })
}

fn compute_nullable(nts: &mut [NtInfo], rules: &[GRule]) {
    loop {
        let mut changed = false;
        for r in rules {
            if !nts[r.lhs].nullable
                && r.rhs.iter().all(|s| match s {
                    GSym::Nt(n) => nts[*n].nullable,
                    _ => false,
                })
            {
                nts[r.lhs].nullable = true;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

/// Transitive closure of numeric levels and `Priority` chains.
fn priority_relation(lang: &LanguageSpec, diags: &mut Vec<Diagnostic>) -> BTreeSet<(usize, usize)> {
    let cf: Vec<&Production> = lang.productions.iter().filter(|p| !p.lexical).collect();
    let mut names: BTreeMap<&str, usize> = BTreeMap::new();
    for p in &cf {
        if let Some(n) = &p.attrs.name {
            if names.insert(n, p.id).is_some() {
                diags.push(Diagnostic::error(
                    Category::DuplicateDef,
                    p.span.clone(),
                    format!("production name `{n}` is used twice"),
                ));
            }
        }
    }
    let mut rel = BTreeSet::new();
    for p in &cf {
        for q in &cf {
            if let (Some(a), Some(b)) = (p.attrs.prio, q.attrs.prio) {
                if a > b {
                    rel.insert((p.id, q.id));
                }
            }
        }
    }
    let mut declared = Vec::new();
    for decl in &lang.priorities {
        let mut ids = Vec::new();
        for n in &decl.chain {
            match names.get(&**n) {
                Some(&id) => ids.push(id),
                None => diags.push(Diagnostic::error(
                    Category::UnknownName,
                    decl.span.clone(),
                    format!("no production is named `{n}`"),
                )),
            }
        }
        for w in ids.windows(2) {
            rel.insert((w[0], w[1]));
            declared.push((w[0], w[1], decl.span.clone()));
        }
    }
    let n = lang.productions.len();
    let mut reach = vec![vec![false; n]; n];
    for &(a, b) in &rel {
        reach[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let via = reach[k].clone();
                for (r, v) in reach[i].iter_mut().zip(via) {
                    *r |= v;
                }
            }
        }
    }
    let cyclic: Vec<&(usize, usize, SourceSpan)> = declared.iter().filter(|(a, _, _)| reach[*a][*a]).collect();
    if let Some((_, _, span)) = cyclic.iter().min_by(|x, y| x.2.cmp(&y.2)) {
        let mut involved: Vec<String> = (0..n)
            .filter(|&i| reach[i][i])
            .map(|i| {
                lang.productions[i]
                    .attrs
                    .name
                    .as_deref()
                    .map(str::to_string)
                    .unwrap_or_else(|| format!("#{i}"))
            })
            .collect();
        involved.dedup();
        diags.push(Diagnostic::error(
            Category::PriorityCycle,
            span.clone(),
            format!("priorities are cyclic among {}", involved.join(", ")),
        ));
    }
    let mut out = BTreeSet::new();
    for (i, row) in reach.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            if r {
                out.insert((i, j));
            }
        }
    }
    out
}
