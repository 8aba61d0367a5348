//! Raw records and CSV ingestion (RFC 4180, UTF-8, header row).

use std::collections::HashSet;
use std::path::Path;

use crate::data::schema::{ColumnKind, FeatureSchema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum RawValue {
    Missing,
    Number(f64),
    Token(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub record_id: String,
    /// One value per schema column, in schema order.
    pub values: Vec<RawValue>,
}

/// Loads a CSV whose header matches the schema (record-id column plus every
/// feature column, any order). Missing cells are flagged, malformed rows are
/// reported with their line number, and duplicate record ids are rejected.
pub fn load_csv(path: impl AsRef<Path>, schema: &FeatureSchema) -> Result<Vec<RawRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path.as_ref())
        .map_err(|e| Error::Csv {
            line: 0,
            message: e.to_string(),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Csv {
            line: 1,
            message: e.to_string(),
        })?
        .clone();

    let mut id_pos = None;
    let mut col_pos = vec![None; schema.columns.len()];
    for (pos, name) in headers.iter().enumerate() {
        if name == schema.record_id {
            if id_pos.replace(pos).is_some() {
                return Err(Error::Schema(format!(
                    "duplicate header column {:?}",
                    schema.record_id
                )));
            }
        } else if let Some(idx) = schema.column_index(name) {
            if col_pos[idx].replace(pos).is_some() {
                return Err(Error::Schema(format!("duplicate header column {name:?}")));
            }
        } else {
            return Err(Error::Schema(format!("unknown column {name:?} in header")));
        }
    }
    let id_pos = id_pos.ok_or_else(|| {
        Error::Schema(format!(
            "header missing record-id column {:?}",
            schema.record_id
        ))
    })?;
    let col_pos: Vec<usize> = col_pos
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            p.ok_or_else(|| {
                Error::Schema(format!(
                    "header missing column {:?}",
                    schema.columns[i].name
                ))
            })
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut seen_ids = HashSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(csv::Position::line).unwrap_or(0);
            Error::Csv {
                line,
                message: e.to_string(),
            }
        })?;
        let line = row.position().map(csv::Position::line).unwrap_or(0);
        if row.len() != headers.len() {
            return Err(Error::Csv {
                line,
                message: format!("expected {} fields, got {}", headers.len(), row.len()),
            });
        }
        let record_id = row.get(id_pos).unwrap_or("").to_string();
        if record_id.is_empty() {
            return Err(Error::Csv {
                line,
                message: "empty record id".to_string(),
            });
        }
        if !seen_ids.insert(record_id.clone()) {
            return Err(Error::Csv {
                line,
                message: format!("duplicate record id {record_id:?}"),
            });
        }
        let mut values = Vec::with_capacity(schema.columns.len());
        for (idx, col) in schema.columns.iter().enumerate() {
            let cell = row.get(col_pos[idx]).unwrap_or("");
            let value = if cell.is_empty() {
                RawValue::Missing
            } else {
                match &col.kind {
                    ColumnKind::Numeric { .. } => {
                        let parsed = cell.parse::<f64>().map_err(|_| Error::Csv {
                            line,
                            message: format!("column {:?}: bad number {cell:?}", col.name),
                        })?;
                        if !parsed.is_finite() {
                            return Err(Error::Csv {
                                line,
                                message: format!("column {:?}: non-finite number", col.name),
                            });
                        }
                        RawValue::Number(parsed)
                    }
                    ColumnKind::Categorical { .. } | ColumnKind::CategoricalHashed { .. } => {
                        RawValue::Token(cell.to_string())
                    }
                }
            };
            values.push(value);
        }
        records.push(RawRecord { record_id, values });
    }
    Ok(records)
}

/// Writes records as CSV in schema order. Numbers are formatted with six
/// decimal places so repeated writes are byte-identical.
pub fn write_csv(
    path: impl AsRef<Path>,
    schema: &FeatureSchema,
    records: &[RawRecord],
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(|e| Error::Csv {
        line: 0,
        message: e.to_string(),
    })?;
    let mut header = vec![schema.record_id.clone()];
    header.extend(schema.columns.iter().map(|c| c.name.clone()));
    writer.write_record(&header).map_err(io_err)?;
    for record in records {
        let mut row = Vec::with_capacity(header.len());
        row.push(record.record_id.clone());
        for value in &record.values {
            row.push(match value {
                RawValue::Missing => String::new(),
                RawValue::Number(v) => format!("{v:.6}"),
                RawValue::Token(t) => t.clone(),
            });
        }
        writer.write_record(&row).map_err(io_err)?;
    }
    writer.flush()?;
    Ok(())
}

fn io_err(e: csv::Error) -> Error {
    Error::Csv {
        line: 0,
        message: e.to_string(),
    }
}
