use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::value::{Name, Value};

/// Meta-variable occurrence in rules, patterns and equation right sides.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetaVar {
    pub name: Name,
    /// `X*`: binds (or splices) a sequence of arguments.
    pub seq: bool,
    /// `V:values`: only matches values of the sort.
    pub sort: Option<Name>,
}

impl MetaVar {
    pub fn plain(name: &str) -> Self {
        MetaVar {
            name: Arc::from(name),
            seq: false,
            sort: None,
        }
    }
}

/// Funcon terms, with meta-variables allowed in rule contexts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Value(Value),
    Apply(Name, Vec<Term>),
    Var(MetaVar),
}

impl Term {
    pub fn apply(name: &str, args: Vec<Term>) -> Term {
        Term::Apply(Arc::from(name), args)
    }

    pub fn var(name: &str) -> Term {
        Term::Var(MetaVar::plain(name))
    }

    pub fn as_value(&self) -> Option<&Value> {
        match self {
            Term::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Term::Value(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Value(_) => true,
            Term::Var(_) => false,
            Term::Apply(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Value(_) => {}
            Term::Var(v) => {
                out.insert(v.name.clone());
            }
            Term::Apply(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Visits every application node, outermost first.
    pub fn for_each_apply<'a>(&'a self, f: &mut impl FnMut(&'a Name, &'a [Term])) {
        if let Term::Apply(name, args) = self {
            f(name, args);
            for a in args {
                a.for_each_apply(f);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Apply(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            _ => 1,
        }
    }
}

impl From<Value> for Term {
    fn from(v: Value) -> Self {
        Term::Value(v)
    }
}

impl fmt::Display for MetaVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.seq {
            f.write_str("*")?;
        }
        if let Some(s) = &self.sort {
            write!(f, ":{s}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Value(v) => write!(f, "{v}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Apply(name, args) => {
                f.write_str(name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}
