use std::collections::BTreeMap;

use super::value_has_sort;
use crate::analysis::SymbolTable;
use crate::term::{MetaVar, Term};
use crate::value::{Name, Value};

/// What a meta-variable stands for after a successful match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    One(Term),
    /// A variadic `X*` tail.
    Many(Vec<Term>),
}

pub type Bindings = BTreeMap<Name, Binding>;

/// Matches a rule pattern against a ground term.
///
/// Names are compared after alias expansion, a constructor pattern also
/// matches the corresponding constructor value, and a repeated variable
/// must bind equal terms each time.
pub fn match_term_pattern(p: &Term, t: &Term, table: &SymbolTable) -> Option<Bindings> {
    let mut b = Bindings::new();
    match_into(p, t, table, &mut b).then_some(b)
}

pub(crate) fn match_into(p: &Term, t: &Term, table: &SymbolTable, b: &mut Bindings) -> bool {
    match p {
        Term::Var(v) if v.seq => sort_ok(v, t, table) && bind(b, &v.name, Binding::Many(vec![t.clone()])),
        Term::Var(v) => sort_ok(v, t, table) && bind(b, &v.name, Binding::One(t.clone())),
        Term::Value(pv) => matches!(t, Term::Value(tv) if tv == pv),
        Term::Apply(f, ps) => {
            let f = table.canonical(f);
            match t {
                Term::Apply(g, ts) => table.canonical(g) == f && match_args(ps, ts, table, b),
                Term::Value(Value::Constructor(c, vs)) if c == f => {
                    let ts: Vec<Term> = vs.iter().cloned().map(Term::Value).collect();
                    match_args(ps, &ts, table, b)
                }
                _ => false,
            }
        }
    }
}

/// A typed variable only matches values, and only those of a known sort.
/// Sort variables (`V:T`) accept any value.
fn sort_ok(v: &MetaVar, t: &Term, table: &SymbolTable) -> bool {
    match (&v.sort, t) {
        (None, _) => true,
        (Some(s), Term::Value(val)) => value_has_sort(val, s, table) != Some(false),
        (Some(_), _) => false,
    }
}

fn bind(b: &mut Bindings, name: &Name, val: Binding) -> bool {
    match b.get(name) {
        Some(prev) => *prev == val,
        None => {
            b.insert(name.clone(), val);
            true
        }
    }
}

fn match_args(ps: &[Term], ts: &[Term], table: &SymbolTable, b: &mut Bindings) -> bool {
    let Some(k) = ps.iter().position(|p| matches!(p, Term::Var(v) if v.seq)) else {
        return ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| match_into(p, t, table, b));
    };
    let fixed = ps.len() - 1;
    if ts.len() < fixed {
        return false;
    }
    let tail = ts.len() - (ps.len() - k - 1);
    let Term::Var(v) = &ps[k] else { unreachable!() };
    ps[..k].iter().zip(&ts[..k]).all(|(p, t)| match_into(p, t, table, b))
        && ps[k + 1..]
            .iter()
            .zip(&ts[tail..])
            .all(|(p, t)| match_into(p, t, table, b))
        && ts[k..tail].iter().all(|t| sort_ok(v, t, table))
        && bind(b, &v.name, Binding::Many(ts[k..tail].to_vec()))
}

/// An application with constructor applications over values folded into
/// constructor values.
pub(crate) fn mk_apply(name: Name, args: Vec<Term>, table: &SymbolTable) -> Term {
    match table.constructor(&name) {
        Some((_, c)) if c.arg_sorts.len() == args.len() && args.iter().all(Term::is_value) => {
            let vals = args
                .into_iter()
                .map(|a| match a {
                    Term::Value(v) => v,
                    _ => unreachable!("checked above"),
                })
                .collect();
            Term::Value(Value::Constructor(name, vals))
        }
        _ => Term::Apply(name, args),
    }
}

/// Substitutes bindings into `t`, splicing variadic variables and expanding
/// aliases. `None` if a variable is unbound or a sequence is used where one
/// term is expected.
pub fn instantiate(t: &Term, b: &Bindings, table: &SymbolTable) -> Option<Term> {
    match t {
        Term::Value(v) => Some(Term::Value(v.clone())),
        Term::Var(v) => match b.get(&v.name)? {
            Binding::One(t) => Some(t.clone()),
            Binding::Many(ts) if ts.len() == 1 => Some(ts[0].clone()),
            Binding::Many(_) => None,
        },
        Term::Apply(f, args) => {
            let mut out = Vec::with_capacity(args.len());
            for a in args {
                match a {
                    Term::Var(v) if v.seq => match b.get(&v.name)? {
                        Binding::Many(ts) => out.extend(ts.iter().cloned()),
                        Binding::One(t) => out.push(t.clone()),
                    },
                    _ => out.push(instantiate(a, b, table)?),
                }
            }
            Some(mk_apply(table.canonical(f).clone(), out, table))
        }
    }
}

/// A ground term with aliases expanded and constructor values folded.
pub fn canonicalize(t: &Term, table: &SymbolTable) -> Term {
    instantiate(t, &Bindings::new(), table).unwrap_or_else(|| t.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::build_symbol_table;
    use crate::parser::{parse_cbs, parse_term};

    fn table() -> SymbolTable {
        let src = "Datatype booleans ::= true | false\n\
                   Funcon if-true-else(_:booleans, _:=>values, _:=>values) : =>values\n\
                   Alias if-else = if-true-else\n\
                   Funcon f(_:values*) : =>values\n\
                   Funcon g(_:values, _:values) : =>values\n";
        build_symbol_table(&parse_cbs(src, "t").unwrap()).unwrap()
    }

    fn term(s: &str) -> Term {
        canonicalize(&parse_term(s, "t").unwrap(), &table())
    }

    fn pat(s: &str) -> Term {
        parse_term(s, "t").unwrap()
    }

    fn typed(f: &str, sort: &str) -> Term {
        let v = MetaVar {
            sort: Some(Name::from(sort)),
            ..MetaVar::plain("V")
        };
        Term::apply(f, vec![Term::Var(v)])
    }

    #[test]
    fn binds_unevaluated_branches() {
        let t = table();
        let b = match_term_pattern(&pat("if-true-else(true, X, Y)"), &term("if-else(true, g(1, 2), 3)"), &t).unwrap();
        assert_eq!(b["X"], Binding::One(term("g(1, 2)")));
        assert_eq!(b["Y"], Binding::One(term("3")));
        assert!(match_term_pattern(&pat("if-true-else(true, X, Y)"), &term("if-true-else(false, 1, 2)"), &t).is_none());
    }

    #[test]
    fn nonlinear_variables_need_equal_terms() {
        let t = table();
        assert!(match_term_pattern(&pat("g(X, X)"), &term("g(1, 2)"), &t).is_none());
        assert!(match_term_pattern(&pat("g(X, X)"), &term("g(2, 2)"), &t).is_some());
    }

    #[test]
    fn variadic_tail_and_typed_variables() {
        let t = table();
        let b = match_term_pattern(&pat("f(null, X*)"), &term("f(null, 1, g(2, 3))"), &t).unwrap();
        assert_eq!(b["X"], Binding::Many(vec![term("1"), term("g(2, 3)")]));
        assert!(match_term_pattern(&typed("f", "integers"), &term("f(g(1, 2))"), &t).is_none());
        assert!(match_term_pattern(&typed("f", "booleans"), &term("f(true)"), &t).is_some());
        assert!(match_term_pattern(&typed("f", "booleans"), &term("f(1)"), &t).is_none());
    }

    #[test]
    fn instantiation_splices_and_folds() {
        let t = table();
        let b = match_term_pattern(&pat("f(X, Y*)"), &term("f(1, 2, 3)"), &t).unwrap();
        assert_eq!(instantiate(&pat("g(X, f(Y*))"), &b, &t), Some(term("g(1, f(2, 3))")));
        assert_eq!(term("if-else(true, 1, 2)").to_string(), "if-true-else(true,1,2)");
        assert_eq!(term("true"), Term::Value(Value::bool(true)));
        assert_eq!(instantiate(&pat("Z"), &b, &t), None);
    }
}
