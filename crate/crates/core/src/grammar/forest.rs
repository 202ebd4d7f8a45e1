//! Derivation counting over the Earley chart with disambiguation filters,
//! ambiguity location, and extraction of the unique surviving tree.
//!
//! Filters are applied while counting, so a derivation that violates
//! priority, associativity, longest match or keyword reservation simply
//! contributes nothing. Counts saturate at 2: only "none", "one" and "many"
//! matter.

use std::collections::HashMap;
use std::sync::Arc;

use super::ast::{ObjectAst, ObjectNode, ParsedProgram};
use super::earley::{recognize, Chart, InputSym};
use super::{CompiledGrammar, GSym, NtId, NtKind, Origin, RuleId};
use crate::diag::{Category, Diagnostic};
use crate::span::{LineIndex, SourceSpan};
use crate::value::Name;

/// Maps input positions back to source spans.
pub(crate) struct SourceCtx {
    file: Arc<str>,
    /// Byte offset of each character position (plus the end).
    offsets: Vec<usize>,
    index: Option<LineIndex>,
    pattern_span: Option<SourceSpan>,
}

impl SourceCtx {
    pub fn new(text: &str, file: Arc<str>) -> Self {
        let mut offsets: Vec<usize> = text.char_indices().map(|(o, _)| o).collect();
        offsets.push(text.len());
        SourceCtx {
            file,
            offsets,
            index: Some(LineIndex::new(text)),
            pattern_span: None,
        }
    }

    pub fn pattern(span: SourceSpan) -> Self {
        SourceCtx {
            file: span.file_id.clone(),
            offsets: Vec::new(),
            index: None,
            pattern_span: Some(span),
        }
    }

    fn span(&self, i: usize, k: usize) -> SourceSpan {
        match (&self.index, &self.pattern_span) {
            (Some(ix), _) => ix.span(&self.file, self.offsets[i], self.offsets[k]),
            (None, Some(s)) => s.clone(),
            (None, None) => SourceSpan::dummy(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Piece {
    Lit,
    Class,
    Hole(Name),
    Opaque(NtId),
    Rule(RuleId),
    /// A nonterminal child whose rule choice is left open.
    Nt(NtId),
}

type Alt = Vec<(usize, usize, Piece)>;

struct Forest<'a> {
    g: &'a CompiledGrammar,
    input: &'a [InputSym],
    chart: Chart,
    /// `None` while the entry is being computed.
    memo: HashMap<(RuleId, usize, usize, usize), Option<u8>>,
    /// Reads of in-progress entries so far. A result computed while this
    /// grew depended on a provisional zero and is not memoized.
    provisional_reads: usize,
}

fn sat_add(a: u8, b: u8) -> u8 {
    (a + b).min(2)
}

fn sat_mul(a: u8, b: u8) -> u8 {
    (a * b).min(2)
}

impl<'a> Forest<'a> {
    fn text(&self, i: usize, k: usize) -> String {
        self.input[i..k]
            .iter()
            .map(|s| match s {
                InputSym::Char(c) => *c,
                InputSym::Hole { .. } => '\u{fffd}',
            })
            .collect()
    }

    fn hole_at(&self, x: NtId, m: usize, k: usize) -> Option<&Name> {
        match self.input.get(m) {
            Some(InputSym::Hole { nt, var }) if *nt == x && k == m + 1 => Some(var),
            _ => None,
        }
    }

    /// Whether an opaque child `x` over `[m, k)` survives the lexical filters.
    fn opaque_ok(&self, parent: RuleId, x: NtId, m: usize, k: usize) -> bool {
        let info = &self.g.nts[x];
        if !(self.chart.spans.contains(&(x, m, k)) || (m == k && info.nullable)) {
            return false;
        }
        if !self.g.rules[parent].cf {
            return true;
        }
        if self.chart.max_end(x, m) != k {
            return false;
        }
        match &info.kind {
            NtKind::Sort { .. } => !self.g.keywords.contains(&self.text(m, k)),
            _ => true,
        }
    }

    /// Priority and associativity between a parent rule and a child rule
    /// placed at right-side index `pos`.
    fn forbidden(&self, parent: RuleId, pos: usize, child: RuleId) -> bool {
        let pr = &self.g.rules[parent];
        let (Origin::Prod(p), Origin::Prod(q)) = (pr.origin, self.g.rules[child].origin) else {
            return false;
        };
        if !pr.cf {
            return false;
        }
        let user = pos / 2;
        let n_user = pr.rhs.len().div_ceil(2);
        self.g.forbids(p, q, user == 0, user + 1 == n_user)
    }

    fn count_child(&mut self, parent: RuleId, pos: usize, x: NtId, m: usize, k: usize) -> u8 {
        let mut total = u8::from(self.hole_at(x, m, k).is_some());
        if self.g.nts[x].opaque() {
            return sat_add(total, u8::from(self.opaque_ok(parent, x, m, k)));
        }
        let rules = self.g.nts[x].rules.clone();
        for r in rules {
            if !self.forbidden(parent, pos, r) {
                let len = self.g.rules[r].rhs.len();
                total = sat_add(total, self.count_seq(r, len, m, k));
            }
            if total == 2 {
                break;
            }
        }
        total
    }

    /// Number of filtered derivations of the first `d` right-side symbols of
    /// `r` over `[i, k)`.
    fn count_seq(&mut self, r: RuleId, d: usize, i: usize, k: usize) -> u8 {
        if d == 0 {
            return u8::from(i == k);
        }
        if !self.chart.has(k, (r, d, i)) {
            return 0;
        }
        let key = (r, d, i, k);
        match self.memo.get(&key) {
            Some(Some(c)) => return *c,
            Some(None) => {
                // Cycles through this node contribute nothing.
                self.provisional_reads += 1;
                return 0;
            }
            None => {}
        }
        self.memo.insert(key, None);
        let reads_before = self.provisional_reads;
        let g = self.g;
        let c = match &g.rules[r].rhs[d - 1] {
            GSym::Lit(l) => {
                if k >= i + l.len() {
                    self.count_seq(r, d - 1, i, k - l.len())
                } else {
                    0
                }
            }
            GSym::Class(_) => {
                if k > i {
                    self.count_seq(r, d - 1, i, k - 1)
                } else {
                    0
                }
            }
            GSym::Nt(x) => {
                let ends: Vec<usize> = self
                    .chart
                    .item_ends
                    .get(&(r, d - 1, i))
                    .map(|v| v.iter().copied().filter(|&m| m <= k).collect())
                    .unwrap_or_default();
                let mut total = 0;
                let x = *x;
                for m in ends {
                    if m == k && !self.g.nts[x].nullable {
                        continue;
                    }
                    let left = self.count_seq(r, d - 1, i, m);
                    if left == 0 {
                        continue;
                    }
                    total = sat_add(total, sat_mul(left, self.count_child(r, d - 1, x, m, k)));
                    if total == 2 {
                        break;
                    }
                }
                total
            }
        };
        if self.provisional_reads == reads_before {
            self.memo.insert(key, Some(c));
        } else {
            self.memo.remove(&key);
        }
        c
    }

    /// Child choices of nonterminal `x` over `[m, k)` with non-zero count.
    fn child_choices(&mut self, parent: RuleId, pos: usize, x: NtId, m: usize, k: usize) -> Vec<Piece> {
        let mut out = Vec::new();
        if let Some(v) = self.hole_at(x, m, k) {
            out.push(Piece::Hole(v.clone()));
        }
        if self.g.nts[x].opaque() {
            if self.opaque_ok(parent, x, m, k) {
                out.push(Piece::Opaque(x));
            }
            return out;
        }
        for r in self.g.nts[x].rules.clone() {
            let len = self.g.rules[r].rhs.len();
            if !self.forbidden(parent, pos, r) && self.count_seq(r, len, m, k) > 0 {
                out.push(Piece::Rule(r));
            }
        }
        out
    }

    /// Up to `limit` alternative splits of rule `r` over `[i, k)`. With
    /// `collapse`, nonterminal children are not expanded into rule choices.
    fn alternatives(&mut self, r: RuleId, i: usize, k: usize, collapse: bool, limit: usize) -> Vec<Alt> {
        let mut out = Vec::new();
        let mut acc = Vec::new();
        let len = self.g.rules[r].rhs.len();
        self.enum_seq(r, len, i, k, collapse, limit, &mut acc, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn enum_seq(
        &mut self,
        r: RuleId,
        d: usize,
        i: usize,
        k: usize,
        collapse: bool,
        limit: usize,
        acc: &mut Alt,
        out: &mut Vec<Alt>,
    ) {
        if out.len() >= limit {
            return;
        }
        if d == 0 {
            if i == k {
                let mut alt = acc.clone();
                alt.reverse();
                out.push(alt);
            }
            return;
        }
        if self.count_seq(r, d, i, k) == 0 {
            return;
        }
        let g = self.g;
        match &g.rules[r].rhs[d - 1] {
            GSym::Lit(l) => {
                let m = k - l.len();
                acc.push((m, k, Piece::Lit));
                self.enum_seq(r, d - 1, i, m, collapse, limit, acc, out);
                acc.pop();
            }
            GSym::Class(_) => {
                acc.push((k - 1, k, Piece::Class));
                self.enum_seq(r, d - 1, i, k - 1, collapse, limit, acc, out);
                acc.pop();
            }
            GSym::Nt(x) => {
                let ends: Vec<usize> = self
                    .chart
                    .item_ends
                    .get(&(r, d - 1, i))
                    .map(|v| v.iter().copied().filter(|&m| m <= k).collect())
                    .unwrap_or_default();
                for m in ends {
                    if self.count_seq(r, d - 1, i, m) == 0 {
                        continue;
                    }
                    let choices = if collapse {
                        if self.count_child(r, d - 1, *x, m, k) > 0 {
                            vec![Piece::Nt(*x)]
                        } else {
                            vec![]
                        }
                    } else {
                        self.child_choices(r, d - 1, *x, m, k)
                    };
                    for c in choices {
                        acc.push((m, k, c));
                        self.enum_seq(r, d - 1, i, m, collapse, limit, acc, out);
                        acc.pop();
                    }
                }
            }
        }
    }

    /// Descends from an ambiguous rule node to the smallest node at which
    /// two different choices survive.
    fn locate_ambiguity(&mut self, mut r: RuleId, mut i: usize, mut k: usize) -> (usize, usize, Name) {
        loop {
            let alts = self.alternatives(r, i, k, true, 2);
            if alts.len() != 1 {
                return (i, k, self.label(self.g.rules[r].lhs));
            }
            let mut next = None;
            for (pos, (m, e, piece)) in alts[0].iter().enumerate() {
                if let Piece::Nt(x) = piece {
                    if self.count_child(r, pos, *x, *m, *e) >= 2 {
                        let choices = self.child_choices(r, pos, *x, *m, *e);
                        if choices.len() != 1 {
                            return (*m, *e, self.label(*x));
                        }
                        if let Piece::Rule(r2) = choices[0] {
                            next = Some((r2, *m, *e));
                        }
                        break;
                    }
                }
            }
            match next {
                Some((r2, m, e)) => (r, i, k) = (r2, m, e),
                None => return (i, k, self.label(self.g.rules[r].lhs)),
            }
        }
    }

    fn label(&self, nt: NtId) -> Name {
        match &self.g.nts[nt].kind {
            NtKind::Sort { sort, .. } | NtKind::Start(sort) => sort.clone(),
            NtKind::Aux { symbol, .. } => Arc::from(symbol.to_string()),
            NtKind::Layout => Arc::from("layout"),
        }
    }

    fn build_piece(&mut self, piece: &(usize, usize, Piece), ctx: &SourceCtx) -> ObjectAst {
        let (m, k, p) = piece;
        match p {
            Piece::Hole(v) => ObjectAst {
                sort: self.hole_sort(*m),
                node: ObjectNode::Hole(v.clone()),
                span: ctx.span(*m, *k),
            },
            Piece::Opaque(x) => ObjectAst {
                sort: self.label(*x),
                node: ObjectNode::Leaf(self.text(*m, *k)),
                span: ctx.span(*m, *k),
            },
            Piece::Rule(r) => self.build_rule(*r, *m, *k, ctx),
            Piece::Lit | Piece::Class | Piece::Nt(_) => unreachable!("only child pieces are built"),
        }
    }

    fn hole_sort(&self, m: usize) -> Name {
        match &self.input[m] {
            InputSym::Hole { nt, .. } => self.label(*nt),
            InputSym::Char(_) => unreachable!("holes are hole inputs"),
        }
    }

    fn unique_alt(&mut self, r: RuleId, i: usize, k: usize) -> Alt {
        self.alternatives(r, i, k, false, 1)
            .pop()
            .expect("counted derivations can be enumerated")
    }

    fn build_rule(&mut self, r: RuleId, i: usize, k: usize, ctx: &SourceCtx) -> ObjectAst {
        let alt = self.unique_alt(r, i, k);
        let rule = &self.g.rules[r];
        let span = ctx.span(i, k);
        match rule.origin {
            Origin::Prod(p) => {
                let mut children = Vec::new();
                let mut layout = Vec::new();
                for (idx, piece) in alt.iter().enumerate() {
                    if rule.cf && idx % 2 == 1 {
                        layout.push(self.text(piece.0, piece.1));
                    } else if !matches!(piece.2, Piece::Lit | Piece::Class) {
                        children.push(self.build_piece(piece, ctx));
                    }
                }
                ObjectAst {
                    sort: self.g.productions[p].sort.clone(),
                    node: ObjectNode::Branch {
                        prod: p,
                        children,
                        layout,
                    },
                    span,
                }
            }
            Origin::Star | Origin::Plus | Origin::Opt => {
                let mut children = Vec::new();
                let mut layout = Vec::new();
                self.collect_seq(r, i, k, alt, ctx, &mut children, &mut layout);
                let sort = self.label(rule.lhs);
                ObjectAst {
                    sort,
                    node: ObjectNode::Seq { children, layout },
                    span,
                }
            }
            Origin::Start | Origin::Layout | Origin::DefaultLayout => {
                unreachable!("start and layout rules are not tree nodes")
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn collect_seq(
        &mut self,
        r: RuleId,
        i: usize,
        k: usize,
        alt: Alt,
        ctx: &SourceCtx,
        children: &mut Vec<ObjectAst>,
        layout: &mut Vec<String>,
    ) {
        let g = self.g;
        let rule = &g.rules[r];
        match (rule.origin, alt.as_slice()) {
            (_, []) => {}
            (Origin::Star, [(m, e, Piece::Rule(plus))]) => {
                let a = self.unique_alt(*plus, *m, *e);
                self.collect_seq(*plus, *m, *e, a, ctx, children, layout);
            }
            (Origin::Plus, [first, rest @ ..])
                if !rest.is_empty() && matches!(first.2, Piece::Rule(r2) if g.rules[r2].lhs == rule.lhs) =>
            {
                let Piece::Rule(r2) = first.2 else { unreachable!() };
                let a = self.unique_alt(r2, first.0, first.1);
                self.collect_seq(r2, first.0, first.1, a, ctx, children, layout);
                if rule.cf {
                    layout.push(self.text(rest[0].0, rest[0].1));
                }
                let last = rest.last().expect("plus step has an element");
                children.push(self.build_piece(last, ctx));
            }
            (_, [only]) => children.push(self.build_piece(only, ctx)),
            _ => unreachable!("unexpected shape of a regular-operator derivation at {i}..{k}"),
        }
    }
}

/// Parses `input` from the start nonterminal and returns the unique tree.
pub(crate) fn parse(
    g: &CompiledGrammar,
    input: &[InputSym],
    start: NtId,
    ctx: &SourceCtx,
) -> Result<ParsedProgram, Vec<Diagnostic>> {
    let chart = recognize(g, input, start);
    let n = input.len();
    let start_rule = g.nts[start].rules[0];
    if !chart.has(n, (start_rule, 3, 0)) {
        let at = chart.furthest();
        let what = match input.get(at) {
            Some(InputSym::Char(c)) => format!("unexpected {c:?}"),
            Some(InputSym::Hole { var, .. }) => format!("unexpected meta-variable `{var}`"),
            None => "unexpected end of input".to_string(),
        };
        let end = (at + 1).min(n);
        return Err(vec![Diagnostic::error(Category::Parse, ctx.span(at, end), what)]);
    }
    let mut f = Forest {
        g,
        input,
        chart,
        memo: HashMap::new(),
        provisional_reads: 0,
    };
    match f.count_seq(start_rule, 3, 0, n) {
        0 => Err(vec![Diagnostic::error(
            Category::Parse,
            ctx.span(0, n),
            "no parse satisfies the priority, associativity and longest-match rules",
        )]),
        1 => {
            let alt = f.unique_alt(start_rule, 0, n);
            let leading = f.text(alt[0].0, alt[0].1);
            let trailing = f.text(alt[2].0, alt[2].1);
            let ast = f.build_piece(&alt[1], ctx);
            Ok(ParsedProgram { leading, ast, trailing })
        }
        _ => {
            let (i, k, sort) = f.locate_ambiguity(start_rule, 0, n);
            Err(vec![Diagnostic::error(
                Category::Ambiguity,
                ctx.span(i, k),
                format!("`{}` has more than one parse as {sort}", f.text(i, k)),
            )])
        }
    }
}
