//! CSV and JSON report writers.
//!
//! Every JSON report carries `schema_version`; CSV files have a fixed header.

use crate::error::Result;
use serde::Serialize;
use std::path::Path;

/// Version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// Two-column CSV `epsilon,<value_name>`.
pub fn profile_csv(entries: &[(f64, f64)], value_name: &str) -> Result<String> {
    two_column_csv("epsilon", value_name, entries)
}

/// Two-column CSV with the given header.
pub fn two_column_csv(first: &str, second: &str, rows: &[(f64, f64)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([first, second])?;
    for (a, b) in rows {
        w.write_record([fmt_f64(*a), fmt_f64(*b)])?;
    }
    finish(w)
}

/// CSV with an arbitrary header and numeric rows.
pub fn table_csv(header: &[String], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|v| fmt_f64(*v)))?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Shortest round-trip representation; non-finite values as `inf`, `-inf`, `nan`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON of `body` with a leading `schema_version` field.
///
/// `body` must serialize as a map.
pub fn to_versioned_json<T: Serialize>(body: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Versioned {
        schema_version: SCHEMA_VERSION,
        body,
    })?)
}

pub fn write_json<T: Serialize>(path: &Path, body: &T) -> Result<()> {
    std::fs::write(path, to_versioned_json(body)?)?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_round_trip() {
        let s = profile_csv(&[(0.5, 1.0 / 3.0), (0.25, f64::INFINITY)], "sup").unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("epsilon,sup"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[1].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(lines.next(), Some("2.5e-1,inf"));
    }

    #[test]
    fn json_is_versioned() {
        #[derive(Serialize)]
        struct B {
            a: u8,
        }
        let v: serde_json::Value = serde_json::from_str(&to_versioned_json(&B { a: 3 }).unwrap()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["a"], 3);
    }
}
