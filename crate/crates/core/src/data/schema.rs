//! Feature schema: the contract between ingestion and the models.
//!
//! Schema file grammar (one directive per line, `#` starts a comment):
//!
//! ```text
//! record_id <column-name>
//! numeric <column-name> [nullable]
//! categorical <column-name> vocab=<v1|v2|...>
//! categorical <column-name> buckets=<n>
//! ```
//!
//! Encoded widths: a numeric column is one z-scored value, plus a missing
//! indicator when nullable; a vocabulary column is one-hot over the
//! vocabulary plus an other/missing slot; a hashed column is `buckets`
//! slots plus a missing slot. Vocabularies above [`MAX_ONE_HOT`] entries
//! must be declared hashed.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Largest vocabulary encoded one-hot; larger cardinalities hash into buckets.
pub const MAX_ONE_HOT: usize = 64;

/// Default bucket count for hashed categorical columns.
pub const DEFAULT_HASH_BUCKETS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric { nullable: bool },
    Categorical { vocab: Vec<String> },
    CategoricalHashed { buckets: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

impl ColumnSpec {
    pub fn encoded_width(&self) -> usize {
        match &self.kind {
            ColumnKind::Numeric { nullable } => 1 + usize::from(*nullable),
            ColumnKind::Categorical { vocab } => vocab.len() + 1,
            ColumnKind::CategoricalHashed { buckets } => buckets + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    pub record_id: String,
    pub columns: Vec<ColumnSpec>,
}

impl FeatureSchema {
    pub fn new(record_id: impl Into<String>, columns: Vec<ColumnSpec>) -> Result<Self> {
        let record_id = record_id.into();
        let mut seen = std::collections::HashSet::new();
        seen.insert(record_id.clone());
        for col in &columns {
            if col.name.is_empty() {
                return Err(Error::Schema("empty column name".to_string()));
            }
            if !seen.insert(col.name.clone()) {
                return Err(Error::Schema(format!(
                    "duplicate column name {:?}",
                    col.name
                )));
            }
            match &col.kind {
                ColumnKind::Categorical { vocab } => {
                    if vocab.is_empty() {
                        return Err(Error::Schema(format!(
                            "column {:?} has an empty vocabulary",
                            col.name
                        )));
                    }
                    if vocab.len() > MAX_ONE_HOT {
                        return Err(Error::Schema(format!(
                            "column {:?} has {} vocabulary entries (max {MAX_ONE_HOT}); declare it with buckets=",
                            col.name,
                            vocab.len()
                        )));
                    }
                    let mut vs = std::collections::HashSet::new();
                    for v in vocab {
                        if !vs.insert(v) {
                            return Err(Error::Schema(format!(
                                "column {:?} repeats vocabulary entry {v:?}",
                                col.name
                            )));
                        }
                    }
                }
                ColumnKind::CategoricalHashed { buckets } => {
                    if *buckets == 0 {
                        return Err(Error::Schema(format!(
                            "column {:?} needs at least one bucket",
                            col.name
                        )));
                    }
                }
                ColumnKind::Numeric { .. } => {}
            }
        }
        if columns.is_empty() {
            return Err(Error::Schema(
                "schema declares no feature columns".to_string(),
            ));
        }
        Ok(FeatureSchema { record_id, columns })
    }

    pub fn encoded_width(&self) -> usize {
        self.columns.iter().map(ColumnSpec::encoded_width).sum()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut record_id: Option<String> = None;
        let mut columns = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let directive = parts.next().unwrap();
            let err = |msg: String| Error::Schema(format!("line {}: {msg}", lineno + 1));
            match directive {
                "record_id" => {
                    let name = parts
                        .next()
                        .ok_or_else(|| err("record_id needs a column name".to_string()))?;
                    if record_id.replace(name.to_string()).is_some() {
                        return Err(err("record_id declared twice".to_string()));
                    }
                }
                "numeric" => {
                    let name = parts
                        .next()
                        .ok_or_else(|| err("numeric needs a column name".to_string()))?;
                    let nullable = match parts.next() {
                        None => false,
                        Some("nullable") => true,
                        Some(other) => return Err(err(format!("unexpected token {other:?}"))),
                    };
                    columns.push(ColumnSpec {
                        name: name.to_string(),
                        kind: ColumnKind::Numeric { nullable },
                    });
                }
                "categorical" => {
                    let name = parts
                        .next()
                        .ok_or_else(|| err("categorical needs a column name".to_string()))?;
                    let arg = parts
                        .next()
                        .ok_or_else(|| err("categorical needs vocab= or buckets=".to_string()))?;
                    let kind = if let Some(list) = arg.strip_prefix("vocab=") {
                        ColumnKind::Categorical {
                            vocab: list.split('|').map(str::to_string).collect(),
                        }
                    } else if let Some(n) = arg.strip_prefix("buckets=") {
                        let buckets = n
                            .parse::<usize>()
                            .map_err(|_| err(format!("bad bucket count {n:?}")))?;
                        ColumnKind::CategoricalHashed { buckets }
                    } else {
                        return Err(err(format!("unexpected token {arg:?}")));
                    };
                    columns.push(ColumnSpec {
                        name: name.to_string(),
                        kind,
                    });
                }
                other => return Err(err(format!("unknown directive {other:?}"))),
            }
            if let Some(extra) = parts.next() {
                return Err(Error::Schema(format!(
                    "line {}: trailing token {extra:?}",
                    lineno + 1
                )));
            }
        }
        let record_id = record_id.ok_or_else(|| Error::Schema("missing record_id".to_string()))?;
        FeatureSchema::new(record_id, columns)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "record_id {}", self.record_id);
        for col in &self.columns {
            match &col.kind {
                ColumnKind::Numeric { nullable } => {
                    let _ = writeln!(
                        out,
                        "numeric {}{}",
                        col.name,
                        if *nullable { " nullable" } else { "" }
                    );
                }
                ColumnKind::Categorical { vocab } => {
                    let _ = writeln!(out, "categorical {} vocab={}", col.name, vocab.join("|"));
                }
                ColumnKind::CategoricalHashed { buckets } => {
                    let _ = writeln!(out, "categorical {} buckets={buckets}", col.name);
                }
            }
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        FeatureSchema::parse(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}
