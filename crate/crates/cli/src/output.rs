//! JSON and CSV writers. Floating-point values carry 17 significant digits.

use heattrace::spectrum::TraceSamples;
use serde::Serialize;
use serde_json::{Number, Value};
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn digits17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rewrites every float in the tree with 17 significant digits; non-finite values become null.
fn fix_precision(v: Value) -> Value {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => match n.as_f64() {
            Some(x) if x.is_finite() => Number::from_str(&digits17(x)).map_or(Value::Null, Value::Number),
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(fix_precision).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, fix_precision(v))).collect()),
        other => other,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = fix_precision(serde_json::to_value(value)?);
    serde_json::to_string_pretty(&v)
}

pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> io::Result<()> {
    let text = to_json(value).map_err(io::Error::other)?;
    let mut w = sink(path)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

pub fn write_csv(s: &TraceSamples, path: Option<&Path>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    w.write_record(["t", "value", "tail_bound"]).map_err(io::Error::other)?;
    for ((t, v), b) in s.samples.iter().zip(&s.truncation_bound) {
        w.write_record([digits17(*t), digits17(*v), digits17(*b)]).map_err(io::Error::other)?;
    }
    w.flush()?;
    Ok(())
}

/// Structured error record on stderr.
pub fn report_error(kind: &str, message: &str) {
    let v = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{v}");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_get_seventeen_digits() {
        let s = to_json(&serde_json::json!({ "a": 0.1, "b": [1, 2.5], "c": f64::NAN })).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("2.5000000000000000e"), "{s}");
        assert!(s.contains("\"c\": null"), "{s}");
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["b"][0].as_u64(), Some(1));
        assert_eq!(v["a"].as_f64(), Some(0.1));
    }
}
