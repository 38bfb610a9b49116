use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::Format;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// Long-format table: one header, rows of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

/// `x` rounded to `digits` significant digits, in `%g` style.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell_text(c: &Cell, digits: usize) -> String {
    match c {
        Cell::Num(x) => format_sig(*x, digits),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn cell_json(c: &Cell, digits: usize) -> Value {
    match c {
        Cell::Num(x) => {
            let rounded: f64 = format_sig(*x, digits).parse().unwrap_or(*x);
            serde_json::Number::from_f64(rounded).map_or_else(|| Value::String(format_sig(*x, digits)), Value::Number)
        }
        Cell::Int(i) => Value::from(*i),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(s) => Value::String(s.clone()),
    }
}

pub fn to_csv(table: &Table, digits: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(|c| cell_text(c, digits))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn to_json(table: &Table, digits: usize) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table
                .columns
                .iter()
                .zip(row)
                .map(|(k, c)| (k.to_string(), cell_json(c, digits)))
                .collect();
            Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
    s.push('\n');
    s
}

pub fn config_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema: u32,
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub format: String,
    pub precision: usize,
    pub report: String,
    pub rows: usize,
    pub status: String,
}

/// Writes `<dir>/<command>.<ext>` and `<dir>/<command>.manifest.json`.
pub fn emit_report(
    dir: &Path,
    command: &str,
    table: &Table,
    format: Format,
    precision: usize,
    config_text: &str,
    status: &str,
) -> io::Result<(PathBuf, PathBuf)> {
    let wrap = |path: &Path, e: io::Error| io::Error::new(e.kind(), format!("{}: {e}", path.display()));
    fs::create_dir_all(dir).map_err(|e| wrap(dir, e))?;
    let report = dir.join(format!("{command}.{}", format.extension()));
    let body = match format {
        Format::Csv => to_csv(table, precision),
        Format::Json => to_json(table, precision),
    };
    fs::write(&report, body).map_err(|e| wrap(&report, e))?;
    let manifest = Manifest {
        schema: SCHEMA_VERSION,
        command: command.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: config_hash(config_text),
        format: format.extension().into(),
        precision,
        report: report.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        rows: table.rows.len(),
        status: status.into(),
    };
    let mpath = dir.join(format!("{command}.manifest.json"));
    let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
    text.push('\n');
    fs::write(&mpath, text).map_err(|e| wrap(&mpath, e))?;
    Ok((report, mpath))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(std::f64::consts::PI, 12), "3.14159265359");
        assert_eq!(format_sig(-2.5e-7, 12), "-2.5e-07");
        assert_eq!(format_sig(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(format_sig(0.000123, 3), "0.000123");
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(to_csv(&t, 12), "a,b\n");
        assert_eq!(to_json(&t, 12), "[]\n");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(&["x", "k", "s"]);
        t.push(vec![Cell::Num(1.0 / 3.0), Cell::Int(2), "pass".into()]);
        let csv = to_csv(&t, 12);
        let json: Value = serde_json::from_str(&to_json(&t, 12)).unwrap();
        let from_csv: f64 = csv.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(json[0]["x"].as_f64().unwrap(), from_csv);
    }

    #[test]
    fn hash_tracks_text() {
        assert_eq!(config_hash("a"), config_hash("a"));
        assert_ne!(config_hash("a"), config_hash("a "));
        assert_eq!(config_hash("").len(), 64);
    }
}
