//! Value sorts known to the runtime, used by sort-membership conditions and
//! typed meta-variables.

use crate::value::Value;

/// Sorts with a native meaning. Datatype sorts declared in specifications
/// are known in addition to these.
pub const BUILTIN_SORTS: &[&str] = &[
    "values",
    "integers",
    "identifiers",
    "texts",
    "locations",
    "maps",
    "environments",
    "stores",
    "null",
    "sequences",
];

pub fn is_builtin_sort(sort: &str) -> bool {
    BUILTIN_SORTS.contains(&sort)
}

/// Membership of a value in a builtin sort; `None` when `sort` is not builtin.
pub fn builtin_has_sort(v: &Value, sort: &str) -> Option<bool> {
    Some(match sort {
        "values" => true,
        "integers" => matches!(v, Value::Integer(_)),
        "identifiers" => matches!(v, Value::Identifier(_)),
        "texts" => matches!(v, Value::Text(_)),
        "locations" => matches!(v, Value::Location(_)),
        "maps" | "environments" | "stores" => matches!(v, Value::Map(_)),
        "null" => matches!(v, Value::Null),
        "sequences" => matches!(v, Value::Sequence(_)),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership() {
        assert_eq!(builtin_has_sort(&Value::int(3), "integers"), Some(true));
        assert_eq!(builtin_has_sort(&Value::Location(0), "integers"), Some(false));
        assert_eq!(builtin_has_sort(&Value::Null, "values"), Some(true));
        assert_eq!(builtin_has_sort(&Value::Null, "booleans"), None);
    }
}
