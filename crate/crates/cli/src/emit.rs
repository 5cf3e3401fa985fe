//! CSV and JSON emission. CSV floats carry 17 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<Option<u32>> for Cell {
    fn from(v: Option<u32>) -> Self {
        v.map_or(Cell::Empty, |d| Cell::Int(d as i64))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Rows under a fixed header; the JSON form uses the header names as keys.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::csv))?;
        }
        out.flush()
    }

    pub fn json_records(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect()
    }
}

/// What a command emits: a CSV table and the matching JSON records.
pub struct Output {
    pub table: Table,
    pub json: Vec<Value>,
}

impl Output {
    pub fn from_table(table: Table) -> Self {
        let json = table.json_records();
        Self { table, json }
    }
}

fn io_err(path: Option<&Path>) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_owned),
        source,
    }
}

fn write_to(out: &Output, format: Format, w: &mut impl Write) -> io::Result<()> {
    match format {
        Format::Csv => out.table.write_csv(w)?,
        Format::Json => {
            for rec in &out.json {
                serde_json::to_writer(&mut *w, rec)?;
                writeln!(w)?;
            }
        }
    }
    w.flush()
}

/// Writes to `path`, or to stdout when `None`.
pub fn emit(out: &Output, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(io_err(Some(p)))?;
            write_to(out, format, &mut BufWriter::new(f)).map_err(io_err(Some(p)))
        }
        None => {
            let stdout = io::stdout();
            write_to(out, format, &mut stdout.lock()).map_err(io_err(None))
        }
    }
}

pub fn write_table(table: &Table, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(io_err(Some(path)))?;
    let mut w = BufWriter::new(f);
    table
        .write_csv(&mut w)
        .and_then(|_| w.flush())
        .map_err(io_err(Some(path)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(-2.0), "-2.0000000000000000e0");
        let back: f64 = fmt_float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(vec!["name", "x", "n", "missing"]);
        t.push(vec!["a,b".into(), 1.5.into(), 3usize.into(), Cell::Empty]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "name,x,n,missing\n\"a,b\",1.5000000000000000e0,3,\n"
        );
        let j = t.json_records();
        assert_eq!(j[0]["x"], 1.5);
        assert!(j[0]["missing"].is_null());
    }
}
