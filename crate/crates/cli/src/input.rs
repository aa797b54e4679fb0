//! Argument parsing helpers: partitions, rational lists and JSON matrices.

use std::fs;

use serde_json::Value;
use whittaker_core::{parse_rational, QMatrix, Rational};

/// A failure to read or decode user input. Reported as a usage error.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// A comma-separated list of nonnegative integers, taken as one flag value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parts(pub Vec<usize>);

/// A comma-separated list of rationals, taken as one flag value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rationals(pub Vec<Rational>);

/// `"3,2,1"` -> `[3, 2, 1]`. The empty string is the empty list.
pub fn parse_parts(s: &str) -> Result<Parts, String> {
    if s.trim().is_empty() {
        return Ok(Parts(Vec::new()));
    }
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("not a nonnegative integer: {p:?}")))
        .collect::<Result<_, _>>()
        .map(Parts)
}

/// `"1,-1,1/2"` -> rationals.
pub fn parse_rationals(s: &str) -> Result<Rationals, String> {
    if s.trim().is_empty() {
        return Ok(Rationals(Vec::new()));
    }
    s.split(',')
        .map(|p| parse_rational(p).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(Rationals)
}

/// Reads `arg` as inline JSON when it starts with `[` or `{`, else as a file path.
pub fn load_json(arg: &str) -> Result<Value, InputError> {
    let t = arg.trim_start();
    let text = if t.starts_with('[') || t.starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| InputError(format!("cannot read {arg:?}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| InputError(format!("invalid JSON in {arg:?}: {e}")))
}

fn scalar(v: &Value) -> Result<Rational, InputError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| InputError(e.to_string())),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => Err(InputError(format!("matrix entries must be integers or \"p/q\" strings, got {n}"))),
        },
        other => Err(InputError(format!("not a matrix entry: {other}"))),
    }
}

/// A matrix is a list of rows. A flat list is read as a diagonal matrix.
pub fn matrix(v: &Value) -> Result<QMatrix, InputError> {
    let rows = v.as_array().ok_or_else(|| InputError("a matrix must be a JSON array".into()))?;
    if rows.iter().all(|r| !r.is_array()) {
        let d = rows.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
        return Ok(QMatrix::diag(&d));
    }
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| InputError("mixed rows and scalars in matrix".into()))?
                .iter()
                .map(scalar)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    QMatrix::from_rows(rows).map_err(|e| InputError(e.to_string()))
}

pub fn load_matrix(arg: &str) -> Result<QMatrix, InputError> {
    matrix(&load_json(arg)?)
}

/// Field `key` of a JSON object, as a matrix.
pub fn field_matrix(obj: &Value, key: &str) -> Result<Option<QMatrix>, InputError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => matrix(v).map(Some).map_err(|e| InputError(format!("{key}: {e}"))),
    }
}

pub fn required_matrix(obj: &Value, key: &str) -> Result<QMatrix, InputError> {
    field_matrix(obj, key)?.ok_or_else(|| InputError(format!("missing field {key:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use whittaker_core::{q, qf};

    #[test]
    fn parts_and_rationals() {
        assert_eq!(parse_parts("3, 1").unwrap(), Parts(vec![3, 1]));
        assert_eq!(parse_parts("").unwrap(), Parts(Vec::new()));
        assert!(parse_parts("3,x").is_err());
        assert!(parse_parts("-1").is_err());
        assert_eq!(parse_rationals("1,-1/2").unwrap(), Rationals(vec![q(1), qf(-1, 2)]));
    }

    #[test]
    fn matrices_from_json() {
        let m = load_matrix(r#"[[0, "1/2"], [0, 0]]"#).unwrap();
        assert_eq!(m.get(0, 1), &qf(1, 2));
        let d = load_matrix("[1, -1]").unwrap();
        assert_eq!(d, QMatrix::diag(&[q(1), q(-1)]));
        assert!(load_matrix("[[1, 2], [3]]").is_err());
        assert!(load_matrix("[[1.5]]").is_err());
        assert!(load_matrix("/nonexistent/file.json").is_err());
    }
}
