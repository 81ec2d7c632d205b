//! Byte-stable CSV and JSON rendering plus run manifests.
//!
//! Reals are printed with 10 significant digits: positional notation when
//! the decimal exponent lies in `[-5, 15)`, scientific otherwise, trailing
//! zeros trimmed. JSON carries reals as strings of the same text so that
//! golden files do not depend on a float printer.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

/// Formats `x` with 10 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.9e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };

    if (-5..15).contains(&exp) {
        let (int_part, frac_part) = if exp >= 0 {
            let split = exp as usize + 1;
            let padded = format!("{digits:0<width$}", width = split.max(digits.len()));
            (padded[..split].to_string(), padded[split..].to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat((-exp - 1) as usize), digits))
        };
        let frac = frac_part.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{}e{exp}", &digits[..1])
        } else {
            format!("{sign}{}.{frac}e{exp}", &digits[..1])
        }
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(x) => fmt_real(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => csv_escape(s),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(x) => Value::String(fmt_real(*x)),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Column-named rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    /// Header line plus one line per row, each ending in `\n`.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// Rows as JSON objects keyed by column name.
    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// One JSON object from named cells, in the given order.
pub fn json_object<'a>(fields: impl IntoIterator<Item = (&'a str, Cell)>) -> Value {
    Value::Object(fields.into_iter().map(|(k, c)| (k.to_string(), c.json())).collect())
}

/// Provenance written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Resolved parameters, already rendered as text.
    pub parameters: Map<String, Value>,
    pub tool_version: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: Map<String, Value>) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn to_json(&self) -> String {
        json_text(&serde_json::to_value(self).expect("manifest serializes"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(0.5), "0.5");
        assert_eq!(fmt_real(77.0), "77");
        assert_eq!(fmt_real(-0.0), "0");
        assert_eq!(fmt_real(0.758_264_379_1), "0.7582643791");
        assert_eq!(fmt_real(1.0 / 3.0), "0.3333333333");
        assert_eq!(fmt_real(-2.000_01), "-2.00001");
        assert_eq!(fmt_real(1e-5), "0.00001");
        assert_eq!(fmt_real(1.234_567_890_12e-6), "1.23456789e-6");
        assert_eq!(fmt_real(123_456_789_012.0), "123456789000");
        assert_eq!(fmt_real(1e15), "1e15");
        assert_eq!(fmt_real(-3.5e20), "-3.5e20");
        assert_eq!(fmt_real(f64::INFINITY), "inf");
        assert_eq!(fmt_real(f64::NAN), "NaN");
        assert_eq!(fmt_real(0.99999), "0.99999");
        assert_eq!(fmt_real(1e-8), "1e-8");
    }

    #[test]
    fn formatted_values_round_trip_to_ten_digits() {
        for &x in &[0.123_456_789_87, 9.999_999_999_9, -4.2e-3, 6.02e23, 1.0 - 1e-12] {
            let y: f64 = fmt_real(x).parse().unwrap();
            assert!(((x - y) / x).abs() <= 5e-10, "{x} -> {y}");
        }
    }

    #[test]
    fn csv_and_json_tables() {
        let mut t = Table::new(["lambda", "coverage", "label", "ok", "n"]);
        t.push(vec![1.0.into(), 0.5.into(), "a,b".into(), true.into(), 3u64.into()]);
        t.push(vec![2.0.into(), Cell::Empty, "x".into(), false.into(), 4u64.into()]);
        assert_eq!(
            t.to_csv(),
            "lambda,coverage,label,ok,n\n1,0.5,\"a,b\",true,3\n2,,x,false,4\n"
        );
        let j = t.to_json_value();
        assert_eq!(j[0]["coverage"], Value::String("0.5".into()));
        assert_eq!(j[1]["coverage"], Value::Null);
        assert_eq!(j[0]["n"], Value::from(3));
        let keys: Vec<&String> = j[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["lambda", "coverage", "label", "ok", "n"]);
    }

    #[test]
    fn manifest_fields() {
        let mut params = Map::new();
        params.insert("h".into(), Value::String("0.6".into()));
        let m = RunManifest::new("optimize", params);
        let v: Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v["subcommand"], "optimize");
        assert_eq!(v["parameters"]["h"], "0.6");
        assert!(v["timestamp"].as_str().unwrap().ends_with('Z'));
    }
}
