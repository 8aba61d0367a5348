//! Feature encoding: z-scored numerics (with missing indicators for nullable
//! columns), one-hot categoricals with an other/missing slot, and hashed
//! categoricals.

use std::fmt::Write as _;
use std::path::Path;

use crate::data::records::{RawRecord, RawValue};
use crate::data::schema::{ColumnKind, FeatureSchema};
use crate::error::{Error, Result};
use crate::tensor::Tensor2D;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericStats {
    pub mean: f64,
    /// Population standard deviation, guarded to 1 for constant columns.
    pub std: f64,
}

/// Fitted encoding statistics: one entry per schema column, `Some` for
/// numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingStats {
    pub numeric: Vec<Option<NumericStats>>,
}

impl EncodingStats {
    fn fit(records: &[RawRecord], schema: &FeatureSchema) -> Self {
        let mut numeric = Vec::with_capacity(schema.columns.len());
        for (idx, col) in schema.columns.iter().enumerate() {
            if !matches!(col.kind, ColumnKind::Numeric { .. }) {
                numeric.push(None);
                continue;
            }
            let mut sum = 0.0;
            let mut count = 0usize;
            for r in records {
                if let RawValue::Number(v) = r.values[idx] {
                    sum += v;
                    count += 1;
                }
            }
            let mean = if count > 0 { sum / count as f64 } else { 0.0 };
            let mut var = 0.0;
            for r in records {
                if let RawValue::Number(v) = r.values[idx] {
                    var += (v - mean) * (v - mean);
                }
            }
            let std = if count > 0 {
                (var / count as f64).sqrt()
            } else {
                0.0
            };
            let std = if std > 0.0 { std } else { 1.0 };
            numeric.push(Some(NumericStats { mean, std }));
        }
        EncodingStats { numeric }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (idx, stats) in self.numeric.iter().enumerate() {
            if let Some(s) = stats {
                let _ = writeln!(out, "{idx} {:e} {:e}", s.mean, s.std);
            }
        }
        out
    }

    pub fn parse(text: &str, schema: &FeatureSchema) -> Result<Self> {
        let mut numeric: Vec<Option<NumericStats>> = schema
            .columns
            .iter()
            .map(|c| match c.kind {
                ColumnKind::Numeric { .. } => Some(NumericStats {
                    mean: 0.0,
                    std: 1.0,
                }),
                _ => None,
            })
            .collect();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let bad = || Error::Schema(format!("stats line {}: malformed entry", lineno + 1));
            let idx: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let mean: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let std: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            match numeric.get_mut(idx) {
                Some(slot @ Some(_)) => *slot = Some(NumericStats { mean, std }),
                _ => {
                    return Err(Error::Schema(format!(
                        "stats line {}: column {idx} is not numeric in this schema",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(EncodingStats { numeric })
    }

    pub fn load(path: impl AsRef<Path>, schema: &FeatureSchema) -> Result<Self> {
        EncodingStats::parse(&std::fs::read_to_string(path)?, schema)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn hash_bucket(token: &str, buckets: usize) -> usize {
    // FNV-1a 64.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in token.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    (h % buckets as u64) as usize
}

/// Encodes records into a dense matrix of width `schema.encoded_width()`.
///
/// Numeric columns are z-scored with `stats` when given, otherwise statistics
/// are fitted from `records` first; the fitted statistics are returned either
/// way. Unknown categorical tokens fall into the other/missing slot.
pub fn encode(
    records: &[RawRecord],
    schema: &FeatureSchema,
    stats: Option<&EncodingStats>,
) -> Result<(Tensor2D, EncodingStats)> {
    for (i, r) in records.iter().enumerate() {
        if r.values.len() != schema.columns.len() {
            return Err(Error::Schema(format!(
                "record {} ({:?}) has {} values, schema has {} columns",
                i,
                r.record_id,
                r.values.len(),
                schema.columns.len()
            )));
        }
    }
    let stats = match stats {
        Some(s) => {
            if s.numeric.len() != schema.columns.len() {
                return Err(Error::Schema(format!(
                    "stats cover {} columns, schema has {}",
                    s.numeric.len(),
                    schema.columns.len()
                )));
            }
            for (col, slot) in schema.columns.iter().zip(&s.numeric) {
                let is_numeric = matches!(col.kind, ColumnKind::Numeric { .. });
                if is_numeric != slot.is_some() {
                    return Err(Error::Schema(format!(
                        "stats disagree with schema at column {:?}",
                        col.name
                    )));
                }
            }
            s.clone()
        }
        None => EncodingStats::fit(records, schema),
    };

    let width = schema.encoded_width();
    let mut out = Tensor2D::zeros(records.len(), width);
    for (row_idx, record) in records.iter().enumerate() {
        let row = out.row_mut(row_idx);
        let mut offset = 0;
        for (col_idx, col) in schema.columns.iter().enumerate() {
            let value = &record.values[col_idx];
            match &col.kind {
                ColumnKind::Numeric { nullable } => {
                    let s = stats.numeric[col_idx].as_ref().unwrap();
                    match value {
                        RawValue::Number(v) => {
                            row[offset] = (v - s.mean) / s.std;
                        }
                        RawValue::Missing => {
                            if !*nullable {
                                return Err(Error::Schema(format!(
                                    "record {:?}: column {:?} is not nullable but has a missing value",
                                    record.record_id, col.name
                                )));
                            }
                            row[offset] = 0.0;
                            row[offset + 1] = 1.0;
                        }
                        RawValue::Token(t) => {
                            return Err(Error::Schema(format!(
                                "record {:?}: column {:?} expected a number, got {t:?}",
                                record.record_id, col.name
                            )));
                        }
                    }
                    offset += 1 + usize::from(*nullable);
                }
                ColumnKind::Categorical { vocab } => {
                    let slot = match value {
                        RawValue::Token(t) => {
                            vocab.iter().position(|v| v == t).unwrap_or(vocab.len())
                        }
                        RawValue::Missing => vocab.len(),
                        RawValue::Number(v) => {
                            // Numeric-looking categories are matched by their token form.
                            let t = format!("{v}");
                            vocab.iter().position(|x| *x == t).unwrap_or(vocab.len())
                        }
                    };
                    row[offset + slot] = 1.0;
                    offset += vocab.len() + 1;
                }
                ColumnKind::CategoricalHashed { buckets } => {
                    let slot = match value {
                        RawValue::Token(t) => hash_bucket(t, *buckets),
                        RawValue::Number(v) => hash_bucket(&format!("{v}"), *buckets),
                        RawValue::Missing => *buckets,
                    };
                    row[offset + slot] = 1.0;
                    offset += buckets + 1;
                }
            }
        }
        debug_assert_eq!(offset, width);
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::ColumnSpec;

    fn numeric_schema() -> FeatureSchema {
        FeatureSchema::new(
            "id",
            vec![ColumnSpec {
                name: "x".to_string(),
                kind: ColumnKind::Numeric { nullable: false },
            }],
        )
        .unwrap()
    }

    fn rec(id: &str, values: Vec<RawValue>) -> RawRecord {
        RawRecord {
            record_id: id.to_string(),
            values,
        }
    }

    #[test]
    fn z_scores_use_population_std() {
        let schema = numeric_schema();
        let records = vec![
            rec("a", vec![RawValue::Number(1.0)]),
            rec("b", vec![RawValue::Number(2.0)]),
            rec("c", vec![RawValue::Number(3.0)]),
        ];
        let (m, stats) = encode(&records, &schema, None).unwrap();
        // mean 2, population sigma sqrt(2/3) = 0.8165
        let s = stats.numeric[0].as_ref().unwrap();
        assert!((s.mean - 2.0).abs() < 1e-12);
        assert!((s.std - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((m.get(0, 0) + 1.224745).abs() < 1e-5);
        assert!((m.get(1, 0)).abs() < 1e-12);
        assert!((m.get(2, 0) - 1.224745).abs() < 1e-5);
    }

    #[test]
    fn one_hot_places_single_one() {
        let schema = FeatureSchema::new(
            "id",
            vec![ColumnSpec {
                name: "cat".to_string(),
                kind: ColumnKind::Categorical {
                    vocab: vec!["a".to_string(), "b".to_string(), "c".to_string()],
                },
            }],
        )
        .unwrap();
        let (m, _) = encode(
            &[rec("r", vec![RawValue::Token("b".to_string())])],
            &schema,
            None,
        )
        .unwrap();
        assert_eq!(m.row(0), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn constant_column_encodes_to_zero() {
        let schema = numeric_schema();
        let records = vec![
            rec("a", vec![RawValue::Number(5.0)]),
            rec("b", vec![RawValue::Number(5.0)]),
        ];
        let (m, stats) = encode(&records, &schema, None).unwrap();
        assert_eq!(stats.numeric[0].as_ref().unwrap().std, 1.0);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(1, 0), 0.0);
    }

    #[test]
    fn missing_numeric_uses_indicator() {
        let schema = FeatureSchema::new(
            "id",
            vec![ColumnSpec {
                name: "x".to_string(),
                kind: ColumnKind::Numeric { nullable: true },
            }],
        )
        .unwrap();
        let records = vec![
            rec("a", vec![RawValue::Number(1.0)]),
            rec("b", vec![RawValue::Missing]),
            rec("c", vec![RawValue::Number(3.0)]),
        ];
        let (m, _) = encode(&records, &schema, None).unwrap();
        assert_eq!(m.row(1), &[0.0, 1.0]);
        assert_eq!(m.row(0)[1], 0.0);
    }

    #[test]
    fn missing_in_non_nullable_column_is_an_error() {
        let schema = numeric_schema();
        let records = vec![rec("a", vec![RawValue::Missing])];
        assert!(encode(&records, &schema, None).is_err());
    }

    #[test]
    fn reusing_stats_is_idempotent() {
        let schema = numeric_schema();
        let records = vec![
            rec("a", vec![RawValue::Number(1.0)]),
            rec("b", vec![RawValue::Number(4.0)]),
        ];
        let (m1, stats) = encode(&records, &schema, None).unwrap();
        let (m2, _) = encode(&records, &schema, Some(&stats)).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn stats_schema_mismatch_is_an_error() {
        let schema = numeric_schema();
        let wrong = EncodingStats {
            numeric: vec![None, None],
        };
        let records = vec![rec("a", vec![RawValue::Number(1.0)])];
        assert!(encode(&records, &schema, Some(&wrong)).is_err());
    }

    #[test]
    fn unknown_token_falls_into_other_slot() {
        let schema = FeatureSchema::new(
            "id",
            vec![ColumnSpec {
                name: "cat".to_string(),
                kind: ColumnKind::Categorical {
                    vocab: vec!["a".to_string()],
                },
            }],
        )
        .unwrap();
        let (m, _) = encode(
            &[rec("r", vec![RawValue::Token("zzz".to_string())])],
            &schema,
            None,
        )
        .unwrap();
        assert_eq!(m.row(0), &[0.0, 1.0]);
    }

    #[test]
    fn stats_text_round_trips() {
        let schema = numeric_schema();
        let records = vec![
            rec("a", vec![RawValue::Number(1.0)]),
            rec("b", vec![RawValue::Number(2.5)]),
        ];
        let (_, stats) = encode(&records, &schema, None).unwrap();
        let parsed = EncodingStats::parse(&stats.to_text(), &schema).unwrap();
        let a = stats.numeric[0].as_ref().unwrap();
        let b = parsed.numeric[0].as_ref().unwrap();
        assert!((a.mean - b.mean).abs() < 1e-15);
        assert!((a.std - b.std).abs() < 1e-15);
    }
}
