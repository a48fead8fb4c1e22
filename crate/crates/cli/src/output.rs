//! Tabular reports and their CSV / JSON encodings.
//!
//! Both encodings print every number with 17 significant digits through
//! [`format_number`], so the two files carry identical digits.

use std::io::Write;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::config::OutputFormat;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Text(String),
    /// `None` is a missing value: empty in CSV, `null` in JSON.
    Num(Option<f64>),
}

/// Computed quantities with the method used per row and the inputs echoed
/// in `metadata`.
#[derive(Debug, Clone)]
pub struct MeasureReport {
    pub metadata: serde_json::Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// `x` with 17 significant digits in exponent form; valid in CSV and JSON.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Num(None) => String::new(),
            Cell::Num(Some(x)) if x.is_finite() => format_number(*x),
            Cell::Num(Some(x)) => x.to_string(),
        }
    }

    fn json_raw(&self) -> Box<RawValue> {
        let text = match self {
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => serde_json::to_string(s).expect("string serializes"),
            Cell::Num(Some(x)) if x.is_finite() => format_number(*x),
            Cell::Num(_) => "null".to_string(),
        };
        RawValue::from_string(text).expect("cell text is valid JSON")
    }
}

struct JsonRow<'a> {
    columns: &'a [String],
    cells: &'a [Cell],
}

impl Serialize for JsonRow<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.columns.len()))?;
        for (name, cell) in self.columns.iter().zip(self.cells) {
            map.serialize_entry(name, &cell.json_raw())?;
        }
        map.end()
    }
}

struct JsonRows<'a>(&'a MeasureReport);

impl Serialize for JsonRows<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.rows.len()))?;
        for cells in &self.0.rows {
            seq.serialize_element(&JsonRow {
                columns: &self.0.columns,
                cells,
            })?;
        }
        seq.end()
    }
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    metadata: &'a serde_json::Value,
    columns: &'a [String],
    rows: JsonRows<'a>,
}

impl MeasureReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Cell::csv_text))
                .map_err(csv_error)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        let doc = JsonDocument {
            metadata: &self.metadata,
            columns: &self.columns,
            rows: JsonRows(self),
        };
        serde_json::to_writer_pretty(&mut out, &doc).map_err(std::io::Error::from)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> Result<(), CliError> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
