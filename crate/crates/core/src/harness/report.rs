//! Tabular reports: ordered rows of typed cells, written as JSON lines or CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

/// Significant digits kept for every float written to a report.
pub const REPORT_DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Null,
}

/// `v` rounded to [`REPORT_DIGITS`] significant digits.
pub fn round_significant(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", REPORT_DIGITS - 1, v).parse().expect("formatted float parses")
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) if v.is_finite() => Value::Number(Number::from_f64(round_significant(*v)).expect("finite")),
            Cell::Float(v) => Value::String(non_finite_label(*v).to_string()),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Null => Value::Null,
        }
    }

    fn from_json(v: &Value) -> Result<Cell> {
        Ok(match v {
            Value::Null => Cell::Null,
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(n) => match n.as_i64() {
                Some(i) if !n.is_f64() => Cell::Int(i),
                _ => Cell::Float(n.as_f64().ok_or_else(|| Error::Parse("number out of range".into()))?),
            },
            Value::String(s) => match s.as_str() {
                "NaN" => Cell::Float(f64::NAN),
                "inf" => Cell::Float(f64::INFINITY),
                "-inf" => Cell::Float(f64::NEG_INFINITY),
                _ => Cell::Text(s.clone()),
            },
            _ => return Err(Error::Parse("report cells must be scalars".into())),
        })
    }

    fn to_csv_field(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
            other => match other.to_json() {
                Value::String(s) => s,
                v => v.to_string(),
            },
        }
    }
}

fn non_finite_label(v: f64) -> &'static str {
    if v.is_nan() {
        "NaN"
    } else if v > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

/// One report line; column order is insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row {
    cells: Vec<(String, Cell)>,
}

impl Row {
    pub fn new() -> Self {
        Row::default()
    }

    pub fn cells(&self) -> &[(String, Cell)] {
        &self.cells
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.cells.iter().find(|(k, _)| k == key).map(|(_, c)| c)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn is_error(&self) -> bool {
        self.get("error").is_some()
    }

    pub fn push(&mut self, key: &str, cell: Cell) {
        if let Some(slot) = self.cells.iter_mut().find(|(k, _)| k == key) {
            slot.1 = cell;
        } else {
            self.cells.push((key.to_string(), cell));
        }
    }

    pub fn int(mut self, key: &str, v: impl TryInto<i64>) -> Self {
        let cell = v.try_into().map(Cell::Int).unwrap_or(Cell::Null);
        self.push(key, cell);
        self
    }

    pub fn float(mut self, key: &str, v: f64) -> Self {
        self.push(key, Cell::Float(v));
        self
    }

    pub fn text(mut self, key: &str, v: impl Into<String>) -> Self {
        self.push(key, Cell::Text(v.into()));
        self
    }

    pub fn flag(mut self, key: &str, v: bool) -> Self {
        self.push(key, Cell::Bool(v));
        self
    }

    pub fn null(mut self, key: &str) -> Self {
        self.push(key, Cell::Null);
        self
    }

    /// Marks the row as failed with `message`.
    pub fn error(self, message: impl std::fmt::Display) -> Self {
        self.text("error", message.to_string())
    }

    pub fn to_json(&self) -> Value {
        let map: Map<String, Value> = self.cells.iter().map(|(k, c)| (k.clone(), c.to_json())).collect();
        Value::Object(map)
    }

    pub fn from_json(v: &Value) -> Result<Row> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("report row must be an object".into()))?;
        let cells = obj.iter().map(|(k, v)| Ok((k.clone(), Cell::from_json(v)?))).collect::<Result<_>>()?;
        Ok(Row { cells })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    JsonLines,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json-lines" | "jsonl" => Ok(ReportFormat::JsonLines),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Config(format!("unknown report format {s:?}"))),
        }
    }
}

pub fn render_json_lines(rows: &[Row]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&row.to_json().to_string());
        out.push('\n');
    }
    out
}

pub fn parse_json_lines(text: &str) -> Result<Vec<Row>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Row::from_json(&serde_json::from_str(l)?))
        .collect()
}

/// Header is the union of row keys in first-seen order; absent cells are empty.
pub fn render_csv(rows: &[Row]) -> Result<String> {
    let mut header: Vec<&str> = Vec::new();
    for row in rows {
        for (k, _) in &row.cells {
            if !header.contains(&k.as_str()) {
                header.push(k);
            }
        }
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for row in rows {
        let record: Vec<String> =
            header.iter().map(|k| row.get(k).map(Cell::to_csv_field).unwrap_or_default()).collect();
        w.write_record(&record).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn render(rows: &[Row], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::JsonLines => Ok(render_json_lines(rows)),
        ReportFormat::Csv => render_csv(rows),
    }
}

/// Writes `rows` to `path`.
pub fn emit_report(rows: &[Row], format: ReportFormat, path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Config("report has no rows".into()));
    }
    std::fs::write(path, render(rows, format)?)?;
    Ok(())
}
