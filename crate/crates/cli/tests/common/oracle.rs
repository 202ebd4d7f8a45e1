//! Reference implementations written independently of the library: a
//! big-step evaluator for pure terms and a parser that enumerates every
//! parse of a token sequence.

#![allow(dead_code)]

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

// -- pure terms ---------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Val {
    Int(i128),
    Bool(bool),
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Int(n) => write!(f, "{n}"),
            Val::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Pure {
    Leaf(Val),
    Op(&'static str, Vec<Pure>),
}

/// The five leaves.
pub const LEAVES: [Val; 5] = [
    Val::Int(0),
    Val::Int(1),
    Val::Int(-2),
    Val::Bool(true),
    Val::Bool(false),
];

/// Operators and their arities.
pub const OPS: [(&str, usize); 10] = [
    ("integer-add", 2),
    ("integer-subtract", 2),
    ("integer-multiply", 2),
    ("integer-divide", 2),
    ("integer-modulo", 2),
    ("is-less", 2),
    ("is-less-or-equal", 2),
    ("is-equal", 2),
    ("not", 1),
    ("if-true-else", 3),
];

impl fmt::Display for Pure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pure::Leaf(v) => write!(f, "{v}"),
            Pure::Op(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Big-step evaluation; `None` where the term has no value.
pub fn eval(t: &Pure) -> Option<Val> {
    let int = |t: &Pure| match eval(t)? {
        Val::Int(n) => Some(n),
        Val::Bool(_) => None,
    };
    match t {
        Pure::Leaf(v) => Some(v.clone()),
        Pure::Op("if-true-else", a) => match eval(&a[0])? {
            Val::Bool(true) => eval(&a[1]),
            Val::Bool(false) => eval(&a[2]),
            Val::Int(_) => None,
        },
        Pure::Op("not", a) => match eval(&a[0])? {
            Val::Bool(b) => Some(Val::Bool(!b)),
            Val::Int(_) => None,
        },
        Pure::Op("is-equal", a) => {
            let x = eval(&a[0])?;
            let y = eval(&a[1])?;
            Some(Val::Bool(x == y))
        }
        Pure::Op(op, a) => {
            let x = int(&a[0])?;
            let y = int(&a[1])?;
            Some(match *op {
                "integer-add" => Val::Int(x + y),
                "integer-subtract" => Val::Int(x - y),
                "integer-multiply" => Val::Int(x * y),
                "integer-divide" if y != 0 => Val::Int(x / y),
                "integer-modulo" if y != 0 => Val::Int(x % y),
                "is-less" => Val::Bool(x < y),
                "is-less-or-equal" => Val::Bool(x <= y),
                _ => return None,
            })
        }
    }
}

/// All terms of height at most `depth`, leaves having height 1.
pub fn all_terms(depth: usize) -> Vec<Pure> {
    let mut terms: Vec<Pure> = LEAVES.iter().cloned().map(Pure::Leaf).collect();
    for _ in 1..depth {
        let prev = terms.clone();
        for (op, arity) in OPS {
            let mut idx = vec![0usize; arity];
            'outer: loop {
                terms.push(Pure::Op(op, idx.iter().map(|&i| prev[i].clone()).collect()));
                for slot in (0..arity).rev() {
                    idx[slot] += 1;
                    if idx[slot] < prev.len() {
                        continue 'outer;
                    }
                    idx[slot] = 0;
                }
                break;
            }
        }
    }
    terms
}

/// Number of terms of height at most `depth`, as a float since it
/// overflows integers quickly.
pub fn count_terms(depth: usize) -> f64 {
    let mut n = LEAVES.len() as f64;
    for _ in 1..depth {
        n = LEAVES.len() as f64 + OPS.iter().map(|&(_, k)| n.powi(k as i32)).sum::<f64>();
    }
    n
}

// -- parse enumeration --------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    Non,
}

#[derive(Clone, Debug)]
pub struct ExpGrammar {
    /// Infix operators with optional priority and associativity.
    pub infix: Vec<(&'static str, Option<u8>, Option<Assoc>)>,
    /// Prefix operators with optional priority.
    pub prefix: Vec<(&'static str, Option<u8>)>,
    pub parens: bool,
    /// Keywords that are whole expressions.
    pub constants: Vec<&'static str>,
}

impl ExpGrammar {
    pub fn simple() -> Self {
        use Assoc::*;
        ExpGrammar {
            infix: vec![
                ("*", Some(5), Some(Left)),
                ("/", Some(5), Some(Left)),
                ("%", Some(5), Some(Left)),
                ("+", Some(4), Some(Left)),
                ("-", Some(4), Some(Left)),
                ("<", Some(3), Some(Non)),
                ("<=", Some(3), Some(Non)),
                (">", Some(3), Some(Non)),
                ("==", Some(3), Some(Non)),
                ("&&", Some(2), Some(Left)),
                ("||", Some(1), Some(Left)),
            ],
            prefix: vec![("!", Some(6))],
            parens: true,
            constants: vec!["true", "false"],
        }
    }

    /// `E ::= E "+" E | ID` with nothing to choose between groupings.
    pub fn underspecified() -> Self {
        ExpGrammar {
            infix: vec![("+", None, None)],
            prefix: vec![],
            parens: false,
            constants: vec![],
        }
    }

    fn infix(&self, tok: &str) -> Option<(Option<u8>, Option<Assoc>)> {
        self.infix.iter().find(|(o, ..)| *o == tok).map(|&(_, p, a)| (p, a))
    }

    fn prefix(&self, tok: &str) -> Option<Option<u8>> {
        self.prefix.iter().find(|(o, _)| *o == tok).map(|&(_, p)| p)
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Tree {
    Atom(String),
    Paren(Rc<Tree>),
    Prefix(String, Rc<Tree>),
    Infix(String, Rc<Tree>, Rc<Tree>),
}

impl Tree {
    /// Fully bracketed rendering without the source parentheses.
    pub fn bracketed(&self) -> String {
        match self {
            Tree::Atom(a) => a.clone(),
            Tree::Paren(t) => t.bracketed(),
            Tree::Prefix(o, t) => format!("{o}{}", t.bracketed()),
            Tree::Infix(o, l, r) => format!("({} {o} {})", l.bracketed(), r.bracketed()),
        }
    }
}

const MULTI: [&str; 4] = ["<=", "==", "&&", "||"];

/// Splits text into identifiers, numbers and operator symbols.
pub fn tokenize(text: &str) -> Option<Vec<String>> {
    let cs: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() {
            let start = i;
            let word = |c: char| c.is_ascii_alphanumeric() || c == '_';
            while i < cs.len() && word(cs[i]) {
                i += 1;
            }
            out.push(cs[start..i].iter().collect());
        } else {
            let two: String = cs[i..(i + 2).min(cs.len())].iter().collect();
            if MULTI.contains(&two.as_str()) {
                out.push(two);
                i += 2;
            } else if "+-*/%<>!()".contains(c) {
                out.push(c.to_string());
                i += 1;
            } else {
                return None;
            }
        }
    }
    Some(out)
}

fn is_atom(g: &ExpGrammar, tok: &str) -> bool {
    let first = tok.chars().next().unwrap_or(' ');
    g.constants.contains(&tok)
        || (first.is_ascii_digit() && tok.chars().all(|c| c.is_ascii_digit()))
        || (first.is_ascii_lowercase() && !matches!(tok, "true" | "false"))
}

/// Priority of the production at the root of `t`; `None` for closed forms.
fn root_prio(g: &ExpGrammar, t: &Tree) -> Option<Option<u8>> {
    match t {
        Tree::Infix(o, ..) => Some(g.infix(o).unwrap().0),
        Tree::Prefix(o, _) => Some(g.prefix(o).unwrap()),
        _ => None,
    }
}

/// Whether `child` may appear directly at an edge of a parent with priority
/// `p` and associativity `a`, on the given side.
fn allowed(g: &ExpGrammar, p: Option<u8>, a: Option<Assoc>, child: &Tree, left_side: bool) -> bool {
    let (Some(p), Some(q)) = (p, root_prio(g, child).flatten()) else {
        return true;
    };
    if q != p {
        return q > p;
    }
    // At equal levels an infix child must lean the way the parent's
    // associativity says; nested prefix operators are unambiguous.
    match child {
        Tree::Infix(..) => a == Some(if left_side { Assoc::Left } else { Assoc::Right }),
        _ => true,
    }
}

pub struct Enumeration {
    /// Every parse, ignoring priorities and associativity.
    pub all: usize,
    /// The parses the declared priorities and associativity allow.
    pub allowed: Vec<Rc<Tree>>,
}

/// Enumerates every parse of `toks` as an expression.
pub fn enumerate(g: &ExpGrammar, toks: &[String]) -> Enumeration {
    let mut memo = HashMap::new();
    let all = count(g, toks, 0, toks.len(), &mut HashMap::new());
    let allowed = trees(g, toks, 0, toks.len(), &mut memo);
    Enumeration { all, allowed }
}

fn count(g: &ExpGrammar, toks: &[String], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
    if i >= j {
        return 0;
    }
    if let Some(&n) = memo.get(&(i, j)) {
        return n;
    }
    let mut n = 0;
    if j == i + 1 && is_atom(g, &toks[i]) {
        n += 1;
    }
    if g.parens && toks[i] == "(" && toks[j - 1] == ")" {
        n += count(g, toks, i + 1, j - 1, memo);
    }
    if g.prefix(&toks[i]).is_some() {
        n += count(g, toks, i + 1, j, memo);
    }
    for k in i + 1..j.saturating_sub(1) {
        if g.infix(&toks[k]).is_some() {
            n += count(g, toks, i, k, memo) * count(g, toks, k + 1, j, memo);
        }
    }
    memo.insert((i, j), n);
    n
}

type Memo = HashMap<(usize, usize), Vec<Rc<Tree>>>;

fn trees(g: &ExpGrammar, toks: &[String], i: usize, j: usize, memo: &mut Memo) -> Vec<Rc<Tree>> {
    if i >= j {
        return Vec::new();
    }
    if let Some(v) = memo.get(&(i, j)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if j == i + 1 && is_atom(g, &toks[i]) {
        out.push(Rc::new(Tree::Atom(toks[i].clone())));
    }
    if g.parens && toks[i] == "(" && toks[j - 1] == ")" {
        for t in trees(g, toks, i + 1, j - 1, memo) {
            out.push(Rc::new(Tree::Paren(t)));
        }
    }
    if let Some(p) = g.prefix(&toks[i]) {
        for t in trees(g, toks, i + 1, j, memo) {
            if allowed(g, p, None, &t, false) {
                out.push(Rc::new(Tree::Prefix(toks[i].clone(), t)));
            }
        }
    }
    for k in i + 1..j.saturating_sub(1) {
        let Some((p, a)) = g.infix(&toks[k]) else { continue };
        let ls = trees(g, toks, i, k, memo);
        if ls.is_empty() {
            continue;
        }
        let rs = trees(g, toks, k + 1, j, memo);
        for l in &ls {
            if !allowed(g, p, a, l, true) {
                continue;
            }
            for r in &rs {
                if allowed(g, p, a, r, false) {
                    out.push(Rc::new(Tree::Infix(toks[k].clone(), l.clone(), r.clone())));
                }
            }
        }
    }
    memo.insert((i, j), out.clone());
    out
}
