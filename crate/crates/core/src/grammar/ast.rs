use std::fmt::Write;

use super::CompiledGrammar;
use crate::span::SourceSpan;
use crate::syntax::Symbol;
use crate::value::Name;

/// A node of an object-language syntax tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectAst {
    /// The sort (`Exp`), or the regular-operator symbol for sequences (`Stmt*`).
    pub sort: Name,
    pub node: ObjectNode,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObjectNode {
    /// A token of a lexical sort.
    Leaf(String),
    /// An application of a context-free production. `children` holds one
    /// tree per nonterminal or regular-operator symbol; `layout[i]` is the
    /// text between symbol `i` and symbol `i + 1`.
    Branch {
        prod: usize,
        children: Vec<ObjectAst>,
        layout: Vec<String>,
    },
    /// The elements matched by a `*`, `+` or `?` symbol.
    Seq {
        children: Vec<ObjectAst>,
        layout: Vec<String>,
    },
    /// A meta-variable, in trees built from syntax patterns.
    Hole(Name),
}

/// A parsed program together with its surrounding layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedProgram {
    pub leading: String,
    pub ast: ObjectAst,
    pub trailing: String,
}

impl ParsedProgram {
    /// Reconstructs the source text.
    pub fn source_text(&self, g: &CompiledGrammar) -> String {
        let mut s = self.leading.clone();
        self.ast.write_yield(g, &mut s);
        s.push_str(&self.trailing);
        s
    }
}

impl ObjectAst {
    pub fn children(&self) -> &[ObjectAst] {
        match &self.node {
            ObjectNode::Branch { children, .. } | ObjectNode::Seq { children, .. } => children,
            _ => &[],
        }
    }

    pub fn production(&self) -> Option<usize> {
        match self.node {
            ObjectNode::Branch { prod, .. } => Some(prod),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        !matches!(self.node, ObjectNode::Hole(_)) && self.children().iter().all(ObjectAst::is_ground)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(ObjectAst::size).sum::<usize>()
    }

    /// Leaf lexemes, terminals and recorded layout, concatenated.
    pub fn yield_text(&self, g: &CompiledGrammar) -> String {
        let mut s = String::new();
        self.write_yield(g, &mut s);
        s
    }

    fn write_yield(&self, g: &CompiledGrammar, out: &mut String) {
        match &self.node {
            ObjectNode::Leaf(l) => out.push_str(l),
            ObjectNode::Hole(v) => out.push_str(v),
            ObjectNode::Seq { children, layout } => {
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        out.push_str(layout.get(i - 1).map(String::as_str).unwrap_or(" "));
                    }
                    c.write_yield(g, out);
                }
            }
            ObjectNode::Branch { prod, children, layout } => {
                let mut kids = children.iter();
                for (i, sym) in g.production(*prod).symbols.iter().enumerate() {
                    if i > 0 {
                        out.push_str(layout.get(i - 1).map(String::as_str).unwrap_or(" "));
                    }
                    match sym {
                        Symbol::Terminal(t) => out.push_str(t),
                        _ => kids
                            .next()
                            .expect("one child per nonterminal symbol")
                            .write_yield(g, out),
                    }
                }
            }
        }
    }

    /// The stable single-line form used by `--ast`.
    pub fn to_sexpr(&self) -> String {
        let mut s = String::new();
        self.write_flat(&mut s);
        s
    }

    fn write_flat(&self, out: &mut String) {
        match &self.node {
            ObjectNode::Leaf(l) => {
                out.push_str(&self.sort);
                out.push(':');
                let _ = crate::value::write_quoted(out, l);
            }
            ObjectNode::Hole(v) => {
                out.push('?');
                out.push_str(v);
            }
            ObjectNode::Seq { children, .. } => {
                out.push('[');
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    c.write_flat(out);
                }
                out.push(']');
            }
            ObjectNode::Branch { prod, children, .. } => {
                let _ = write!(out, "({}#{}", self.sort, prod);
                for c in children {
                    out.push(' ');
                    c.write_flat(out);
                }
                out.push(')');
            }
        }
    }

    /// The `--ast` rendering: one line when it fits in 80 columns, otherwise
    /// one child per line, indented by two spaces per level.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        self.write_pretty(0, &mut s);
        s
    }

    fn write_pretty(&self, indent: usize, out: &mut String) {
        let flat = self.to_sexpr();
        if indent + flat.chars().count() <= 80 || self.children().is_empty() {
            out.push_str(&flat);
            return;
        }
        let (open, close) = match &self.node {
            ObjectNode::Branch { prod, .. } => (format!("({}#{}", self.sort, prod), ")"),
            _ => ("[".to_string(), "]"),
        };
        out.push_str(&open);
        for c in self.children() {
            out.push('\n');
            out.push_str(&" ".repeat(indent + 2));
            c.write_pretty(indent + 2, out);
        }
        out.push_str(close);
    }
}
