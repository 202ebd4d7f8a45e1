use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use cbs_core::grammar::{ObjectAst, ObjectNode};
use cbs_core::interp::{canonicalize, Completion, Interpreter, RunOptions, StuckReason};
use cbs_core::library::{load, Loaded};
use cbs_core::printer::print_spec;
use cbs_core::syntax::Symbol;
use cbs_core::{parse_cbs, parse_term, Term, Value};
use proptest::prelude::*;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn loaded() -> &'static Loaded {
    static L: OnceLock<Loaded> = OnceLock::new();
    L.get_or_init(|| load(&[root().join("lib/funcons"), root().join("languages/simple/simple.cbs")]).unwrap())
}

// -- funcon terms -----------------------------------------------------------

fn leaf_value() -> impl Strategy<Value = Value> {
    prop_oneof![
        (-1000i64..1000).prop_map(Value::int),
        Just(Value::Null),
        "[a-z]{1,3}".prop_map(|s| Value::ident(&s)),
        (0u64..4).prop_map(Value::Location),
    ]
}

fn any_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        leaf_value().prop_map(Term::Value),
        prop::collection::btree_map(leaf_value(), leaf_value(), 0..3).prop_map(|m| Term::Value(Value::Map(m))),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        ("[a-z]{1,4}(-[a-z]{1,4})?", prop::collection::vec(inner, 0..4)).prop_map(|(f, args)| Term::apply(&f, args))
    })
}

/// A term whose every application has an arity its funcon accepts.
fn well_formed_term() -> impl Strategy<Value = Term> {
    let table = &loaded().analysis.table;
    let funcons: Vec<(String, usize, bool)> = table
        .funcons
        .values()
        .map(|f| (f.name.to_string(), f.signature.fixed_arity(), f.signature.is_variadic()))
        .collect();
    let leaf = prop_oneof![
        leaf_value().prop_map(Term::Value),
        prop::sample::select(vec!["true", "false", "broken", "failed"]).prop_map(|c| Term::apply(c, vec![])),
    ];
    leaf.prop_recursive(4, 32, 4, move |inner| {
        (
            prop::sample::select(funcons.clone()),
            prop::collection::vec(inner, 4),
            0usize..3,
        )
            .prop_map(|((name, fixed, variadic), pool, extra)| {
                let n = if variadic { fixed + extra } else { fixed };
                Term::apply(&name, pool.into_iter().cycle().take(n).collect())
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_terms_parse_back(t in any_term()) {
        let printed = t.to_string();
        let back = parse_term(&printed, "p").unwrap();
        prop_assert_eq!(back.to_string(), printed.clone());
        let table = &loaded().analysis.table;
        prop_assert_eq!(canonicalize(&back, table), canonicalize(&t, table));
    }

    #[test]
    fn well_formed_terms_never_stick_on_arity(t in well_formed_term()) {
        let table = &loaded().analysis.table;
        let o = Interpreter::new(table).run(&canonicalize(&t, table), &RunOptions { fuel: 200, trace: false });
        let arity_stuck = matches!(o.result, Completion::Stuck { reason: StuckReason::Arity, .. });
        prop_assert!(!arity_stuck, "{} got {}", t, o.result);
    }
}

// -- specifications ---------------------------------------------------------

fn spec_text() -> impl Strategy<Value = String> {
    let sort = prop::sample::select(vec!["values", "integers", "booleans", "maps"]);
    let param = (sort.clone(), any::<bool>()).prop_map(|(s, lazy)| format!("_:{}{s}", if lazy { "=>" } else { "" }));
    let funcon = (
        "[a-z]{2,5}(-[a-z]{2,5})?",
        prop::collection::vec(param, 0..4),
        sort,
        any::<bool>(),
        prop::collection::vec(any_term(), 0..3),
    );
    prop::collection::vec(funcon, 1..4).prop_map(|fs| {
        let mut s = String::from("Datatype booleans ::= true | false\n");
        for (i, (name, params, res, computes, rhss)) in fs.into_iter().enumerate() {
            let name = format!("{name}{i}");
            let arity = params.len();
            if params.is_empty() {
                s.push_str(&format!("Funcon {name} : {}{res}\n", if computes { "=>" } else { "" }));
            } else {
                s.push_str(&format!("Funcon {name}({}) : =>{res}\n", params.join(", ")));
            }
            let vars: Vec<String> = (1..=arity).map(|k| format!("X{k}")).collect();
            let lhs = if arity == 0 {
                name.clone()
            } else {
                format!("{name}({})", vars.join(", "))
            };
            for rhs in rhss {
                s.push_str(&format!("Rule {lhs} ~> {rhs}\n"));
            }
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_specs_parse_back(text in spec_text()) {
        let spec = parse_cbs(&text, "gen.cbs").unwrap();
        let printed = print_spec(&spec);
        let back = parse_cbs(&printed, "printed.cbs").unwrap();
        prop_assert_eq!(back.without_spans(), spec.without_spans());
        prop_assert_eq!(print_spec(&back), printed);
    }
}

// -- object-language expressions --------------------------------------------

#[derive(Clone, Debug)]
enum Exp {
    Leaf(String),
    Not(Box<Exp>),
    Bin(&'static str, Box<Exp>, Box<Exp>),
}

/// Priority and associativity as declared for SIMPLE expressions.
fn level(op: &str) -> (u8, Option<bool>) {
    match op {
        "*" | "/" | "%" => (5, Some(true)),
        "+" | "-" => (4, Some(true)),
        "<" | "<=" | ">" | "==" => (3, None),
        "&&" => (2, Some(true)),
        "||" => (1, Some(true)),
        _ => unreachable!(),
    }
}

fn exp() -> impl Strategy<Value = Exp> {
    let leaf = prop_oneof![
        (0u32..1000).prop_map(|n| n.to_string()),
        prop::sample::select(vec!["x", "y1", "foo", "true", "false"]).prop_map(str::to_string),
    ]
    .prop_map(Exp::Leaf);
    let ops = vec!["*", "/", "%", "+", "-", "<", "<=", ">", "==", "&&", "||"];
    leaf.prop_recursive(5, 40, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Exp::Not(Box::new(e))),
            (prop::sample::select(ops.clone()), inner.clone(), inner).prop_map(|(o, l, r)| Exp::Bin(
                o,
                Box::new(l),
                Box::new(r)
            )),
        ]
    })
}

impl Exp {
    fn prio(&self) -> u8 {
        match self {
            Exp::Leaf(_) => 7,
            Exp::Not(_) => 6,
            Exp::Bin(op, ..) => level(op).0,
        }
    }

    /// Source text with only the parentheses the declared priorities need.
    fn minimal(&self, sep: &str) -> String {
        match self {
            Exp::Leaf(s) => s.clone(),
            Exp::Not(e) => {
                let inner = e.minimal(sep);
                if e.prio() < 6 {
                    format!("!{sep}({inner})")
                } else {
                    format!("!{sep}{inner}")
                }
            }
            Exp::Bin(op, l, r) => {
                let (p, left_assoc) = level(op);
                let wrap_l = l.prio() < p || (l.prio() == p && left_assoc != Some(true));
                let wrap_r = r.prio() <= p;
                let wl = if wrap_l {
                    format!("({})", l.minimal(sep))
                } else {
                    l.minimal(sep)
                };
                let wr = if wrap_r {
                    format!("({})", r.minimal(sep))
                } else {
                    r.minimal(sep)
                };
                format!("{wl}{sep}{op}{sep}{wr}")
            }
        }
    }

    fn full(&self) -> String {
        match self {
            Exp::Leaf(s) => s.clone(),
            Exp::Not(e) => format!("!{}", e.full()),
            Exp::Bin(op, l, r) => format!("({} {op} {})", l.full(), r.full()),
        }
    }
}

fn full_of_ast(a: &ObjectAst) -> String {
    let g = &loaded().analysis.grammars["simple"];
    match &a.node {
        ObjectNode::Leaf(s) => s.to_string(),
        ObjectNode::Branch { prod, children, .. } => {
            let terms: Vec<&str> = g
                .production(*prod)
                .symbols
                .iter()
                .filter_map(|s| match s {
                    Symbol::Terminal(t) => Some(t.as_str()),
                    _ => None,
                })
                .collect();
            match (terms.as_slice(), children.as_slice()) {
                ([t], []) => t.to_string(),
                (["(", ")"], [e]) => full_of_ast(e),
                (["!"], [e]) => format!("!{}", full_of_ast(e)),
                ([op], [l, r]) => format!("({} {op} {})", full_of_ast(l), full_of_ast(r)),
                ([], [e]) => full_of_ast(e),
                _ => panic!("unexpected production {}", a.to_sexpr()),
            }
        }
        other => panic!("unexpected node {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn expressions_parse_as_their_priorities_say(e in exp(), spaced in any::<bool>()) {
        let g = &loaded().analysis.grammars["simple"];
        let text = e.minimal(if spaced { " " } else { "" });
        let parsed = g.parse_program(&text, "Exp", "gen").unwrap_or_else(|d| panic!("{text}: {d:?}"));
        prop_assert_eq!(full_of_ast(&parsed.ast), e.full(), "{}", text);
        prop_assert_eq!(parsed.source_text(g), text.clone());
        let again = g.parse_program(&text, "Exp", "gen").unwrap();
        prop_assert_eq!(again, parsed);
    }

    #[test]
    fn layout_is_preserved(e in exp(), pad in "[ \n\t]{0,3}") {
        let g = &loaded().analysis.grammars["simple"];
        let text = format!("{pad}{}{pad}", e.minimal(&pad));
        let parsed = g.parse_program(&text, "Exp", "gen").unwrap();
        prop_assert_eq!(parsed.source_text(g), text);
    }
}

#[test]
fn minimal_printing_examples() {
    let e = Exp::Bin(
        "-",
        Box::new(Exp::Leaf("a".into())),
        Box::new(Exp::Bin(
            "-",
            Box::new(Exp::Leaf("b".into())),
            Box::new(Exp::Leaf("c".into())),
        )),
    );
    assert_eq!(e.minimal(" "), "a - (b - c)");
    let n = Exp::Not(Box::new(Exp::Bin(
        "&&",
        Box::new(Exp::Leaf("a".into())),
        Box::new(Exp::Leaf("b".into())),
    )));
    assert_eq!(n.minimal(""), "!(a&&b)");
}
