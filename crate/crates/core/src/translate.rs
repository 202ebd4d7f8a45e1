//! From object-language trees to funcon terms: desugaring followed by the
//! inductive translation functions declared by a language.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::analysis::{SymbolTable, LEAF_FUNCTIONS};
use crate::diag::{Category, Diagnostic};
use crate::grammar::{pattern_matches_production, CompiledGrammar, ObjectAst, ObjectNode};
use crate::interp::canonicalize;
use crate::span::SourceSpan;
use crate::syntax::{LanguageSpec, PatternItem, SyntaxPattern};
use crate::term::Term;
use crate::value::{Name, Value};

/// Meta-variable to matched subtree.
pub type SyntaxBinding = BTreeMap<Name, ObjectAst>;

/// Rewrites allowed at one node before desugaring is declared divergent.
pub const DESUGAR_BUDGET: usize = 10_000;

/// Matches a flat pattern against the root of `t`: either a lone
/// meta-variable of `t`'s sort, or the same production with terminals equal
/// and meta-variables at the nonterminal positions.
pub fn match_syntax_pattern(p: &SyntaxPattern, t: &ObjectAst, g: &CompiledGrammar) -> Option<SyntaxBinding> {
    if let [PatternItem::Var { name, stem, op: None }] = p.items.as_slice() {
        if *stem == t.sort {
            return Some(BTreeMap::from([(name.clone(), t.clone())]));
        }
    }
    let ObjectNode::Branch { prod, children, .. } = &t.node else {
        return None;
    };
    if !pattern_matches_production(p, g.production(*prod)) {
        return None;
    }
    let mut b = SyntaxBinding::new();
    for ((name, _, _), child) in p.vars().zip(children) {
        if let Some(prev) = b.get(name) {
            if !same_phrase(prev, child, g) {
                return None;
            }
        }
        b.insert(name.clone(), child.clone());
    }
    Some(b)
}

fn same_phrase(a: &ObjectAst, b: &ObjectAst, g: &CompiledGrammar) -> bool {
    a.to_sexpr() == b.to_sexpr() && a.yield_text(g) == b.yield_text(g)
}

/// A desugaring rule with its right side pre-parsed into a tree with holes.
struct Rewrite<'a> {
    lhs: &'a SyntaxPattern,
    rhs: ObjectAst,
}

/// Applies the language's desugaring rules innermost-first until none
/// matches anywhere.
pub fn desugar(
    t: &ObjectAst,
    lang: &LanguageSpec,
    g: &CompiledGrammar,
    budget: usize,
) -> Result<ObjectAst, Diagnostic> {
    let mut rewrites = Vec::new();
    for rule in &lang.desugar_rules {
        let Some(p) = g
            .productions
            .iter()
            .find(|p| !p.lexical && pattern_matches_production(&rule.lhs, p))
        else {
            return Err(Diagnostic::error(
                Category::PatternMismatch,
                rule.span.clone(),
                format!("`{}` is not an alternative of any sort", rule.lhs),
            ));
        };
        let rhs = g.parse_pattern(&rule.rhs, &p.sort, &rule.span)?;
        rewrites.push(Rewrite { lhs: &rule.lhs, rhs });
    }
    if rewrites.is_empty() {
        return Ok(t.clone());
    }
    desugar_node(t, &rewrites, g, budget, 0)
}

/// Rewrites nested inside the result of another rewrite, beyond which
/// desugaring is also considered divergent.
const MAX_NESTING: usize = 256;

fn divergence(span: &SourceSpan, why: String) -> Diagnostic {
    Diagnostic::error(
        Category::DesugarDivergence,
        span.clone(),
        format!("desugaring does not terminate: {why}"),
    )
}

fn desugar_node(
    t: &ObjectAst,
    rules: &[Rewrite],
    g: &CompiledGrammar,
    budget: usize,
    nesting: usize,
) -> Result<ObjectAst, Diagnostic> {
    let mut cur = desugar_children(t, rules, g, budget, nesting)?;
    let mut used = 0;
    'outer: loop {
        for r in rules {
            if let Some(b) = match_syntax_pattern(r.lhs, &cur, g) {
                used += 1;
                if used > budget {
                    return Err(divergence(
                        &t.span,
                        format!("more than {budget} rewrites of one phrase"),
                    ));
                }
                if nesting >= MAX_NESTING {
                    return Err(divergence(
                        &t.span,
                        format!("rewrites nest more than {MAX_NESTING} deep"),
                    ));
                }
                let next = fill_holes(&r.rhs, &b, &t.span);
                cur = desugar_children(&next, rules, g, budget, nesting + 1)?;
                continue 'outer;
            }
        }
        return Ok(cur);
    }
}

fn desugar_children(
    t: &ObjectAst,
    rules: &[Rewrite],
    g: &CompiledGrammar,
    budget: usize,
    nesting: usize,
) -> Result<ObjectAst, Diagnostic> {
    let mut out = t.clone();
    match &mut out.node {
        ObjectNode::Branch { children, .. } | ObjectNode::Seq { children, .. } => {
            for c in children.iter_mut() {
                *c = desugar_node(c, rules, g, budget, nesting)?;
            }
        }
        ObjectNode::Leaf(_) | ObjectNode::Hole(_) => {}
    }
    Ok(out)
}

/// Instantiates a right-side tree; synthesized nodes take the span of the
/// phrase being rewritten.
fn fill_holes(t: &ObjectAst, b: &SyntaxBinding, span: &SourceSpan) -> ObjectAst {
    match &t.node {
        ObjectNode::Hole(v) => b.get(v).cloned().unwrap_or_else(|| t.clone()),
        ObjectNode::Leaf(_) => ObjectAst {
            span: span.clone(),
            ..t.clone()
        },
        ObjectNode::Branch { prod, children, layout } => ObjectAst {
            sort: t.sort.clone(),
            node: ObjectNode::Branch {
                prod: *prod,
                children: children.iter().map(|c| fill_holes(c, b, span)).collect(),
                layout: layout.clone(),
            },
            span: span.clone(),
        },
        ObjectNode::Seq { children, layout } => ObjectAst {
            sort: t.sort.clone(),
            node: ObjectNode::Seq {
                children: children.iter().map(|c| fill_holes(c, b, span)).collect(),
                layout: layout.clone(),
            },
            span: span.clone(),
        },
    }
}

/// Translation of desugared trees by one language's equations.
pub struct Translator<'a> {
    lang: &'a LanguageSpec,
    g: &'a CompiledGrammar,
    table: &'a SymbolTable,
}

impl<'a> Translator<'a> {
    pub fn new(lang: &'a LanguageSpec, g: &'a CompiledGrammar, table: &'a SymbolTable) -> Self {
        Translator { lang, g, table }
    }

    /// Applies the first equation of `fn_name` whose left side matches `t`.
    pub fn translate(&self, t: &ObjectAst, fn_name: &str) -> Result<Term, Diagnostic> {
        let mut ts = self.translate_one(t, fn_name)?;
        Ok(ts.pop().expect("one phrase translates to one term"))
    }

    fn translate_one(&self, t: &ObjectAst, fn_name: &str) -> Result<Vec<Term>, Diagnostic> {
        if let Some(leaf) = self.leaf(t, fn_name)? {
            return Ok(vec![leaf]);
        }
        for eq in self.lang.equations.iter().filter(|e| &*e.fn_name == fn_name) {
            if let Some(b) = match_syntax_pattern(&eq.lhs, t, self.g) {
                let mut out = self.rhs(&eq.rhs, &b, &eq.span)?;
                return match out.len() {
                    1 => Ok(vec![canonicalize(&out.pop().expect("checked"), self.table)]),
                    n => Err(Diagnostic::error(
                        Category::PatternMismatch,
                        eq.span.clone(),
                        format!("right side of `{fn_name}` produced {n} terms instead of one"),
                    )),
                };
            }
        }
        Err(Diagnostic::error(
            Category::NoEquation,
            t.span.clone(),
            format!("no equation of `{fn_name}` matches this {} phrase", t.sort),
        ))
    }

    fn leaf(&self, t: &ObjectAst, fn_name: &str) -> Result<Option<Term>, Diagnostic> {
        if !LEAF_FUNCTIONS.contains(&fn_name) {
            return Ok(None);
        }
        let text = t.yield_text(self.g);
        let v = match fn_name {
            "id" => Value::ident(&text),
            _ => match text.parse::<BigInt>() {
                Ok(i) => Value::Integer(i),
                Err(_) => {
                    return Err(Diagnostic::error(
                        Category::PatternMismatch,
                        t.span.clone(),
                        format!("`{text}` is not an integer literal"),
                    ))
                }
            },
        };
        Ok(Some(Term::Value(v)))
    }

    /// Instantiates an equation's right side. A translation applied to a
    /// sequence phrase yields one term per element, spliced into the
    /// enclosing argument list.
    fn rhs(&self, t: &Term, b: &SyntaxBinding, span: &SourceSpan) -> Result<Vec<Term>, Diagnostic> {
        match t {
            Term::Value(v) => Ok(vec![Term::Value(v.clone())]),
            Term::Var(v) => Err(Diagnostic::error(
                Category::PatternMismatch,
                span.clone(),
                format!(
                    "syntax meta-variable `{}` must be passed to a translation function",
                    v.name
                ),
            )),
            Term::Apply(f, args) => {
                let is_fn = LEAF_FUNCTIONS.contains(&&**f) || self.lang.semantics_decls.iter().any(|d| d.fn_name == *f);
                if is_fn {
                    let [Term::Var(v)] = args.as_slice() else {
                        return Err(Diagnostic::error(
                            Category::Arity,
                            span.clone(),
                            format!("translation function `{f}` takes exactly one meta-variable"),
                        ));
                    };
                    let Some(phrase) = b.get(&v.name) else {
                        return Err(Diagnostic::error(
                            Category::UnboundVar,
                            span.clone(),
                            format!("meta-variable `{}` is not bound by the left side", v.name),
                        ));
                    };
                    return match &phrase.node {
                        ObjectNode::Seq { children, .. } => {
                            let mut out = Vec::with_capacity(children.len());
                            for c in children {
                                out.extend(self.translate_one(c, f)?);
                            }
                            Ok(out)
                        }
                        _ => self.translate_one(phrase, f),
                    };
                }
                let mut out = Vec::with_capacity(args.len());
                for a in args {
                    out.extend(self.rhs(a, b, span)?);
                }
                Ok(vec![Term::Apply(f.clone(), out)])
            }
        }
    }
}

/// The translation function a program is started with: the first declared
/// for `sort`, or the first declared at all.
pub fn start_function<'l>(lang: &'l LanguageSpec, sort: Option<&str>) -> Option<(&'l Name, &'l Name)> {
    lang.semantics_decls
        .iter()
        .find(|d| sort.is_none_or(|s| &*d.source_sort == s))
        .map(|d| (&d.fn_name, &d.source_sort))
}

/// Parses, desugars and translates a program.
pub fn translate_program(
    lang: &LanguageSpec,
    g: &CompiledGrammar,
    table: &SymbolTable,
    text: &str,
    file_id: &str,
    sort: Option<&str>,
) -> Result<Term, Vec<Diagnostic>> {
    let Some((fn_name, start)) = start_function(lang, sort) else {
        let what = sort.map(|s| format!(" for sort `{s}`")).unwrap_or_default();
        return Err(vec![Diagnostic::error(
            Category::UnknownName,
            lang.span.clone(),
            format!("language `{}` declares no translation function{what}", lang.name),
        )]);
    };
    let parsed = g.parse_program(text, start, file_id)?;
    let ast = desugar(&parsed.ast, lang, g, DESUGAR_BUDGET).map_err(|d| vec![d])?;
    Translator::new(lang, g, table)
        .translate(&ast, fn_name)
        .map_err(|d| vec![d])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::analyze;
    use crate::parser::parse_cbs;

    const SRC: &str = r#"
Datatype booleans ::= true | false
Funcon if-true-else(_:booleans, _:=>values, _:=>values) : =>values
Alias if-else = if-true-else
Funcon bound-value(_:identifiers) : =>values
Funcon sequential(_:=>null*) : =>null
Funcon print(_:values) : =>null
Language mini
Lexical ID ::= [a-z]+
Lexical INT ::= [0-9]+
Syntax Exp ::= ID | INT | Exp "&&" Exp {left} | "(" Exp ")" | "-" Exp
Syntax Blk ::= "{" Exp* "}"
Semantics rval(_:Exp) : =>values
Rule rval(Exp1 "&&" Exp2) = if-else(rval(Exp1), rval(Exp2), false)
Rule rval(ID) = bound-value(id(ID))
Rule rval(INT) = int(INT)
Rule rval("(" Exp ")") = rval(Exp)
Desugar [[ "-" Exp ]] = [[ "(" Exp ")" ]]
Semantics block(_:Blk) : =>null
Rule block("{" Exp* "}") = sequential(rval(Exp*))
"#;

    fn tr(text: &str, sort: &str) -> Result<String, Vec<Diagnostic>> {
        let spec = parse_cbs(SRC, "t.cbs").unwrap();
        let a = analyze(&spec);
        let g = &a.grammars["mini"];
        translate_program(&spec.language_specs[0], g, &a.table, text, "p", Some(sort)).map(|t| t.to_string())
    }

    #[test]
    fn conjunction_becomes_conditional() {
        assert_eq!(
            tr("a && b", "Exp").unwrap(),
            r#"if-true-else(bound-value("a"),bound-value("b"),false)"#
        );
        assert_eq!(tr("5", "Exp").unwrap(), "5");
    }

    #[test]
    fn desugaring_runs_before_translation() {
        assert_eq!(tr("-(7)", "Exp").unwrap(), "7");
    }

    #[test]
    fn sequences_splice() {
        assert_eq!(tr("{ 1 (2) }", "Blk").unwrap(), "sequential(1,2)");
        assert_eq!(tr("{}", "Blk").unwrap(), "sequential");
    }

    #[test]
    fn syntax_patterns_bind_children() {
        let spec = parse_cbs(SRC, "t.cbs").unwrap();
        let a = analyze(&spec);
        let g = &a.grammars["mini"];
        let lang = &spec.language_specs[0];
        let t = g.parse_program("a && b", "Exp", "p").unwrap().ast;
        let b = match_syntax_pattern(&lang.equations[0].lhs, &t, g).unwrap();
        assert_eq!(b["Exp1"].to_sexpr(), r#"(Exp#2 ID:"a")"#);
        let plus = g.parse_program("(a)", "Exp", "p").unwrap().ast;
        assert!(match_syntax_pattern(&lang.equations[0].lhs, &plus, g).is_none());
    }

    #[test]
    fn self_embedding_desugar_diverges() {
        let src = SRC.replace(
            "Desugar [[ \"-\" Exp ]] = [[ \"(\" Exp \")\" ]]",
            "Desugar [[ \"-\" Exp ]] = [[ \"-\" \"-\" Exp ]]",
        );
        let spec = parse_cbs(&src, "t.cbs").unwrap();
        let a = analyze(&spec);
        let g = &a.grammars["mini"];
        let t = g.parse_program("-a", "Exp", "p").unwrap().ast;
        let err = desugar(&t, &spec.language_specs[0], g, 50).unwrap_err();
        assert_eq!(err.category, Category::DesugarDivergence);
    }
}
