use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

pub type Name = Arc<str>;

/// Normal forms of funcon terms.
///
/// The derived ordering is only used to keep maps canonical; it is not exposed
/// as a semantic comparison (locations in particular are only compared for
/// equality by the builtins).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Null,
    Integer(BigInt),
    Constructor(Name, Vec<Value>),
    Identifier(Arc<str>),
    Text(Arc<str>),
    Location(u64),
    Map(BTreeMap<Value, Value>),
    Sequence(Vec<Value>),
}

impl Value {
    pub fn int(i: impl Into<BigInt>) -> Value {
        Value::Integer(i.into())
    }

    pub fn ident(s: &str) -> Value {
        Value::Identifier(Arc::from(s))
    }

    pub fn constant(name: &str) -> Value {
        Value::Constructor(Arc::from(name), Vec::new())
    }

    pub fn bool(b: bool) -> Value {
        Value::constant(if b { "true" } else { "false" })
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Constructor(c, args) if args.is_empty() && &**c == "true" => Some(true),
            Value::Constructor(c, args) if args.is_empty() && &**c == "false" => Some(false),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Integer(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&BTreeMap<Value, Value>> {
        match self {
            Value::Map(m) => Some(m),
            _ => None,
        }
    }
}

pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Integer(i) => write!(f, "{i}"),
            Value::Constructor(c, args) => {
                f.write_str(c)?;
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
            Value::Identifier(s) => write_quoted(f, s),
            Value::Text(s) => {
                f.write_str("text(")?;
                write_quoted(f, s)?;
                f.write_str(")")
            }
            Value::Location(n) => write!(f, "@{n}"),
            Value::Map(m) => {
                f.write_str("{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{k}:{v}")?;
                }
                f.write_str("}")
            }
            Value::Sequence(vs) => {
                f.write_str("[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_printing() {
        assert_eq!(Value::int(-12).to_string(), "-12");
        assert_eq!(Value::ident("a\"b").to_string(), "\"a\\\"b\"");
        assert_eq!(Value::bool(false).to_string(), "false");
        let mut m = BTreeMap::new();
        m.insert(Value::ident("y"), Value::int(2));
        m.insert(Value::ident("x"), Value::int(1));
        assert_eq!(Value::Map(m).to_string(), "{\"x\":1,\"y\":2}");
        assert_eq!(Value::Location(3).to_string(), "@3");
        let cons = Value::Constructor(Arc::from("cons"), vec![Value::int(1), Value::constant("nil")]);
        assert_eq!(cons.to_string(), "cons(1,nil)");
    }
}
