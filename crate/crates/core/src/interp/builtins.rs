use std::collections::BTreeMap;

use num_traits::Zero;

use crate::value::Value;

/// Native funcons over evaluated arguments. `None` means the result is
/// undefined: a zero divisor, a missing key, or arguments of the wrong sort.
pub fn eval_builtin(name: &str, args: &[Value]) -> Option<Value> {
    use Value::*;
    Some(match (name, args) {
        ("integer-add", [Integer(a), Integer(b)]) => Integer(a + b),
        ("integer-subtract", [Integer(a), Integer(b)]) => Integer(a - b),
        ("integer-multiply", [Integer(a), Integer(b)]) => Integer(a * b),
        ("integer-divide", [Integer(a), Integer(b)]) if !b.is_zero() => Integer(a / b),
        ("integer-modulo", [Integer(a), Integer(b)]) if !b.is_zero() => Integer(a % b),
        ("is-less", [Integer(a), Integer(b)]) => Value::bool(a < b),
        ("is-less-or-equal", [Integer(a), Integer(b)]) => Value::bool(a <= b),
        ("is-equal", [a, b]) => Value::bool(a == b),
        ("not", [b]) => Value::bool(!b.as_bool()?),
        ("map-empty", []) => Map(BTreeMap::new()),
        ("map-insert", [Map(m), k, v]) => {
            let mut m = m.clone();
            m.insert(k.clone(), v.clone());
            Map(m)
        }
        ("map-lookup", [Map(m), k]) => m.get(k)?.clone(),
        ("map-override", maps) => {
            let mut out = BTreeMap::new();
            for m in maps.iter().rev() {
                out.extend(m.as_map()?.iter().map(|(k, v)| (k.clone(), v.clone())));
            }
            Map(out)
        }
        ("map-domain", [Map(m)]) => Sequence(m.keys().cloned().collect()),
        ("map-defined", [Map(m), k]) => Value::bool(m.contains_key(k)),
        ("fresh-location", [Map(s)]) => {
            let mut n = s.len() as u64;
            while s.contains_key(&Location(n)) {
                n += 1;
            }
            Location(n)
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ints(xs: &[i64]) -> Vec<Value> {
        xs.iter().map(|&x| Value::int(x)).collect()
    }

    #[test]
    fn arithmetic_is_exact() {
        let big = BigInt::from(1u64 << 62);
        let r = eval_builtin("integer-multiply", &[Value::Integer(big), Value::int(4)]).unwrap();
        assert_eq!(r.to_string(), "18446744073709551616");
        assert_eq!(eval_builtin("integer-divide", &ints(&[-7, 2])), Some(Value::int(-3)));
        assert_eq!(eval_builtin("integer-modulo", &ints(&[-7, 2])), Some(Value::int(-1)));
        assert_eq!(eval_builtin("integer-divide", &ints(&[1, 0])), None);
        assert_eq!(eval_builtin("integer-modulo", &ints(&[1, 0])), None);
    }

    #[test]
    fn comparisons_and_booleans() {
        assert_eq!(eval_builtin("is-less", &ints(&[1, 2])), Some(Value::bool(true)));
        assert_eq!(
            eval_builtin("is-less-or-equal", &ints(&[2, 2])),
            Some(Value::bool(true))
        );
        assert_eq!(
            eval_builtin("is-equal", &[Value::Null, Value::int(0)]),
            Some(Value::bool(false))
        );
        assert_eq!(eval_builtin("not", &[Value::bool(false)]), Some(Value::bool(true)));
        assert_eq!(eval_builtin("not", &ints(&[0])), None);
        assert_eq!(eval_builtin("is-less", &[Value::Location(0), Value::Location(1)]), None);
    }

    #[test]
    fn maps_and_locations() {
        let empty = eval_builtin("map-empty", &[]).unwrap();
        let a = eval_builtin("map-insert", &[empty.clone(), Value::ident("x"), Value::int(1)]).unwrap();
        let b = eval_builtin("map-insert", &[empty.clone(), Value::ident("x"), Value::int(2)]).unwrap();
        let o = eval_builtin("map-override", &[a.clone(), b]).unwrap();
        assert_eq!(eval_builtin("map-lookup", &[o, Value::ident("x")]), Some(Value::int(1)));
        assert_eq!(eval_builtin("map-lookup", &[empty.clone(), Value::ident("x")]), None);
        assert_eq!(eval_builtin("map-override", &[]), Some(empty.clone()));
        assert_eq!(
            eval_builtin("map-domain", std::slice::from_ref(&a)),
            Some(Value::Sequence(vec![Value::ident("x")]))
        );
        assert_eq!(
            eval_builtin("map-defined", &[a, Value::ident("y")]),
            Some(Value::bool(false))
        );
        assert_eq!(eval_builtin("fresh-location", &[empty]), Some(Value::Location(0)));
        let s = Value::Map([(Value::Location(1), Value::Null)].into_iter().collect());
        assert_eq!(eval_builtin("fresh-location", &[s]), Some(Value::Location(2)));
    }
}
