//! Delimited-text pattern files.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use msdgm_core::{MarkedPointPattern, Window};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("input is empty (no header row)")]
    NoHeader,
    #[error("input has a header but no data rows")]
    NoRows,
    #[error("column {0:?} not found in header")]
    MissingColumn(String),
    #[error("row {row} (line {line}): {column} value {value:?} is not a finite number")]
    BadNumber {
        row: usize,
        line: u64,
        column: String,
        value: String,
    },
    #[error("row {row} (line {line}): missing {column} field")]
    MissingField { row: usize, line: u64, column: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Pattern(#[from] msdgm_core::Error),
}

/// Column names, delimiter and optional window for a pattern file.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub x: String,
    pub y: String,
    pub type_column: String,
    pub mark: String,
    pub delimiter: u8,
    /// `None` uses the tight bounding box of the data.
    pub window: Option<Window>,
}

impl Default for Schema {
    fn default() -> Self {
        Self {
            x: "x".into(),
            y: "y".into(),
            type_column: "type".into(),
            mark: "mark".into(),
            delimiter: b',',
            window: None,
        }
    }
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize, LoadError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| LoadError::MissingColumn(name.to_string()))
}

/// Reads a pattern; type labels are registered in first-appearance order.
pub fn load_pattern<R: Read>(source: R, schema: &Schema) -> Result<MarkedPointPattern, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Err(LoadError::NoHeader);
    }
    let cols = [
        column(&headers, &schema.x)?,
        column(&headers, &schema.y)?,
        column(&headers, &schema.type_column)?,
        column(&headers, &schema.mark)?,
    ];
    let names = [&schema.x, &schema.y, &schema.type_column, &schema.mark];

    let mut records = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = idx + 1;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |k: usize| -> Result<&str, LoadError> {
            rec.get(cols[k]).map(str::trim).ok_or_else(|| LoadError::MissingField {
                row,
                line,
                column: names[k].clone(),
            })
        };
        let number = |k: usize| -> Result<f64, LoadError> {
            let raw = field(k)?;
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| LoadError::BadNumber {
                    row,
                    line,
                    column: names[k].clone(),
                    value: raw.to_string(),
                })
        };
        let (x, y, mark) = (number(0)?, number(1)?, number(3)?);
        let label = field(2)?.to_string();
        records.push((x, y, label, mark));
    }
    if records.is_empty() {
        return Err(LoadError::NoRows);
    }
    let pattern = MarkedPointPattern::from_labeled(records, schema.window)?;
    let dup = pattern.duplicate_coordinates();
    if dup > 0 {
        log::warn!("{}", msdgm_core::Warning::DuplicateCoordinates { count: dup });
    }
    Ok(pattern)
}

pub fn load_pattern_file(path: &Path, schema: &Schema) -> Result<MarkedPointPattern, LoadError> {
    load_pattern(File::open(path)?, schema)
}

/// Writes `x,y,type,mark` rows that [`load_pattern`] reads back exactly.
pub fn write_pattern<W: Write>(pattern: &MarkedPointPattern, sink: W) -> Result<(), LoadError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["x", "y", "type", "mark"])?;
    for p in pattern.points() {
        w.write_record([
            p.x.to_string(),
            p.y.to_string(),
            pattern.types()[p.type_id].name.clone(),
            p.mark.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
