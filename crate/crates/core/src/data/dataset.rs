//! Labeled dataset construction: ratio-based negative sampling from the
//! universe, stratified train/test splitting, and inverse-frequency class
//! weights.

use std::collections::HashSet;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;

use crate::container::{self, ArtifactKind};
use crate::data::encode::{encode, EncodingStats, NumericStats};
use crate::data::records::RawRecord;
use crate::data::schema::FeatureSchema;
use crate::error::{Error, Result};
use crate::nn::loss::ClassWeights;
use crate::rng;
use crate::tensor::Tensor2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

/// Encoded feature matrix with labels, per-class weights, and split tags.
///
/// Label-1 rows always come first and correspond one-to-one with the
/// audience; label-0 rows are the sampled negatives.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub features: Tensor2D,
    pub labels: Vec<u8>,
    pub record_ids: Vec<String>,
    pub class_weights: ClassWeights,
    pub split: Vec<Split>,
    pub ratio: f64,
    /// Statistics the feature matrix was encoded with; needed to score new
    /// records consistently.
    pub stats: EncodingStats,
}

/// Builds the prospecting dataset: every audience record becomes a label-1
/// row, and `ratio * |audience|` negatives are drawn uniformly without
/// replacement from the universe with audience ids excluded. Class weights
/// are pure inverse frequency (`w_c = n / n_c`); all rows start tagged Train.
pub fn build_prospecting_dataset(
    audience: &[RawRecord],
    universe: &[RawRecord],
    schema: &FeatureSchema,
    ratio: usize,
    seed: u64,
) -> Result<LabeledDataset> {
    if ratio < 1 {
        return Err(Error::InvalidConfig("ratio must be >= 1".to_string()));
    }
    if audience.is_empty() {
        return Err(Error::InsufficientData("audience is empty".to_string()));
    }
    let audience_ids: HashSet<&str> = audience.iter().map(|r| r.record_id.as_str()).collect();
    let mut candidates: Vec<usize> = universe
        .iter()
        .enumerate()
        .filter(|(_, r)| !audience_ids.contains(r.record_id.as_str()))
        .map(|(i, _)| i)
        .collect();
    let need = ratio * audience.len();
    if candidates.len() < need {
        return Err(Error::InsufficientData(format!(
            "universe minus audience has {} rows, need {need} (ratio {ratio} x audience {})",
            candidates.len(),
            audience.len()
        )));
    }

    // Partial Fisher-Yates: the first `need` entries are a uniform sample
    // without replacement.
    let mut sample_rng = rng::stream(seed, rng::purpose::NEGATIVE_SAMPLE, 0);
    for i in 0..need {
        let j = sample_rng.gen_range(i..candidates.len());
        candidates.swap(i, j);
    }
    let negatives = &candidates[..need];

    let mut records: Vec<RawRecord> = Vec::with_capacity(audience.len() + need);
    records.extend(audience.iter().cloned());
    records.extend(negatives.iter().map(|&i| universe[i].clone()));
    let mut labels = vec![1u8; audience.len()];
    labels.extend(std::iter::repeat(0u8).take(need));

    let (features, stats) = encode(&records, schema, None)?;
    let class_weights = ClassWeights::inverse_frequency(&labels)?;
    let record_ids = records.into_iter().map(|r| r.record_id).collect();
    let split = vec![Split::Train; labels.len()];

    Ok(LabeledDataset {
        features,
        labels,
        record_ids,
        class_weights,
        split,
        ratio: ratio as f64,
        stats,
    })
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    /// Stratified split: each class's test count is `round(n_c * fraction)`,
    /// so every class's test share lands within one row of the target.
    /// Class weights are recomputed on the train split.
    pub fn split(&mut self, test_fraction: f64, seed: u64) -> Result<()> {
        if !(0.0 < test_fraction && test_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "test fraction must be in (0,1), got {test_fraction}"
            )));
        }
        let mut split_rng = rng::stream(seed, rng::purpose::SPLIT, 0);
        let mut tags = vec![Split::Train; self.len()];
        for class in [1u8, 0u8] {
            let mut idx: Vec<usize> = (0..self.len())
                .filter(|&i| self.labels[i] == class)
                .collect();
            let n = idx.len();
            if n == 0 {
                continue;
            }
            let test_count = (n as f64 * test_fraction).round() as usize;
            if test_count >= n {
                return Err(Error::InsufficientData(format!(
                    "class {class} would receive zero train rows ({n} rows, test fraction {test_fraction})"
                )));
            }
            for i in 0..n {
                let j = split_rng.gen_range(i..n);
                idx.swap(i, j);
            }
            for &i in idx.iter().take(test_count) {
                tags[i] = Split::Test;
            }
        }
        self.split = tags;
        let train_labels: Vec<u8> = self
            .labels
            .iter()
            .zip(&self.split)
            .filter(|(_, s)| **s == Split::Train)
            .map(|(&y, _)| y)
            .collect();
        self.class_weights = ClassWeights::inverse_frequency(&train_labels)?;
        Ok(())
    }

    fn indices_for(&self, which: Split) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.split[i] == which)
            .collect()
    }

    pub fn subset(&self, which: Split) -> (Tensor2D, Vec<u8>, Vec<String>) {
        let idx = self.indices_for(which);
        let features = self.features.select_rows(&idx);
        let labels = idx.iter().map(|&i| self.labels[i]).collect();
        let ids = idx.iter().map(|&i| self.record_ids[i].clone()).collect();
        (features, labels, ids)
    }

    /// Binary snapshot of the encoded dataset (same container conventions as
    /// model serialization).
    pub fn save_snapshot(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        container::write_header(&mut w, ArtifactKind::Snapshot)?;
        container::write_u32(&mut w, self.features.rows() as u32)?;
        container::write_u32(&mut w, self.features.cols() as u32)?;
        for &v in self.features.as_slice() {
            container::write_f32(&mut w, v as f32)?;
        }
        for &y in &self.labels {
            container::write_u8(&mut w, y)?;
        }
        for s in &self.split {
            container::write_u8(&mut w, matches!(s, Split::Test) as u8)?;
        }
        for id in &self.record_ids {
            container::write_string(&mut w, id)?;
        }
        container::write_f64(&mut w, self.class_weights.w0)?;
        container::write_f64(&mut w, self.class_weights.w1)?;
        container::write_f64(&mut w, self.ratio)?;
        container::write_u32(&mut w, self.stats.numeric.len() as u32)?;
        for slot in &self.stats.numeric {
            match slot {
                Some(s) => {
                    container::write_u8(&mut w, 1)?;
                    container::write_f64(&mut w, s.mean)?;
                    container::write_f64(&mut w, s.std)?;
                }
                None => container::write_u8(&mut w, 0)?,
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut r = BufReader::new(file);
        let kind = container::read_header(&mut r)?;
        if kind != ArtifactKind::Snapshot {
            return Err(Error::Format(format!("expected snapshot, found {kind:?}")));
        }
        let rows = container::read_u32(&mut r)? as usize;
        let cols = container::read_u32(&mut r)? as usize;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            data.push(container::read_f32(&mut r)? as f64);
        }
        let features = Tensor2D::from_vec(rows, cols, data)?;
        let mut labels = Vec::with_capacity(rows);
        for _ in 0..rows {
            labels.push(container::read_u8(&mut r)?);
        }
        let mut split = Vec::with_capacity(rows);
        for _ in 0..rows {
            split.push(if container::read_u8(&mut r)? == 1 {
                Split::Test
            } else {
                Split::Train
            });
        }
        let mut record_ids = Vec::with_capacity(rows);
        for _ in 0..rows {
            record_ids.push(container::read_string(&mut r)?);
        }
        let w0 = container::read_f64(&mut r)?;
        let w1 = container::read_f64(&mut r)?;
        let ratio = container::read_f64(&mut r)?;
        let n_stats = container::read_u32(&mut r)? as usize;
        let mut numeric = Vec::with_capacity(n_stats);
        for _ in 0..n_stats {
            if container::read_u8(&mut r)? == 1 {
                let mean = container::read_f64(&mut r)?;
                let std = container::read_f64(&mut r)?;
                numeric.push(Some(NumericStats { mean, std }));
            } else {
                numeric.push(None);
            }
        }
        // Trailing garbage is a format error.
        let mut probe = [0u8; 1];
        if r.read(&mut probe)? != 0 {
            return Err(Error::Format("trailing bytes after snapshot".to_string()));
        }
        Ok(LabeledDataset {
            features,
            labels,
            record_ids,
            class_weights: ClassWeights::new(w0, w1)?,
            split,
            ratio,
            stats: EncodingStats { numeric },
        })
    }
}
