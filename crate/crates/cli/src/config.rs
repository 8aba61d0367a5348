//! Run configuration with precedence flags > config file > defaults.
//!
//! Defaults follow the reference selections: ratio 4, encoded size 32,
//! architecture 4096, SGD momentum 0.0001/0.92, batch 256, 100 epochs.

use std::path::Path;

use anyhow::{bail, Context};
use prospect_core::classifier::Architecture;
use prospect_core::forest::{MinSamples, RfConfig};
use prospect_core::nn::optim::{OptimizerConfig, OptimizerKind};
use prospect_core::pipeline::DlaeConfig;
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub ratio: usize,
    pub test_fraction: f64,
    pub encoded_size: usize,
    pub ae_lr: f64,
    pub ae_epochs: usize,
    pub ae_batch_size: usize,
    pub architecture: Architecture,
    pub optimizer: OptimizerKind,
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub threshold: f64,
    pub rf_trees: usize,
    pub rf_max_depth: usize,
    pub rf_min_samples: usize,
    pub rf_min_samples_fraction: Option<f64>,
    pub rf_features_per_split: Option<usize>,
    pub rf_bootstrap: bool,
    pub seeds: Vec<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ratio: 4,
            test_fraction: 0.2,
            encoded_size: 32,
            ae_lr: 1e-3,
            ae_epochs: 100,
            ae_batch_size: 256,
            architecture: Architecture::A4096,
            optimizer: OptimizerKind::SgdMomentum,
            lr: 1e-4,
            momentum: 0.92,
            weight_decay: 0.0,
            epochs: 100,
            batch_size: 256,
            threshold: 0.5,
            rf_trees: 300,
            rf_max_depth: 12,
            rf_min_samples: 5,
            rf_min_samples_fraction: None,
            rf_features_per_split: None,
            rf_bootstrap: true,
            seeds: vec![0],
        }
    }
}

/// JSON config file: every field optional, unknown fields rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub ratio: Option<usize>,
    pub test_fraction: Option<f64>,
    pub encoded_size: Option<usize>,
    pub ae_lr: Option<f64>,
    pub ae_epochs: Option<usize>,
    pub ae_batch_size: Option<usize>,
    pub architecture: Option<String>,
    pub optimizer: Option<String>,
    pub lr: Option<f64>,
    pub momentum: Option<f64>,
    pub weight_decay: Option<f64>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub threshold: Option<f64>,
    pub rf_trees: Option<usize>,
    pub rf_max_depth: Option<usize>,
    pub rf_min_samples: Option<usize>,
    pub rf_min_samples_fraction: Option<f64>,
    pub rf_features_per_split: Option<usize>,
    pub rf_bootstrap: Option<bool>,
    pub seeds: Option<Vec<u64>>,
}

pub fn parse_optimizer(name: &str) -> anyhow::Result<OptimizerKind> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "sgd" | "sgd_momentum" | "sgd-momentum" => OptimizerKind::SgdMomentum,
        "adam" => OptimizerKind::Adam,
        "adamw" => OptimizerKind::AdamW,
        other => bail!("unknown optimizer {other:?} (expected sgd, adam, or adamw)"),
    })
}

impl RunConfig {
    pub fn apply_file(&mut self, path: &Path) -> anyhow::Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let file: ConfigFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = file.$field { self.$field = v; })*
            };
        }
        take!(
            ratio,
            test_fraction,
            encoded_size,
            ae_lr,
            ae_epochs,
            ae_batch_size,
            lr,
            momentum,
            weight_decay,
            epochs,
            batch_size,
            threshold,
            rf_trees,
            rf_max_depth,
            rf_min_samples,
            seeds
        );
        if let Some(v) = file.rf_min_samples_fraction {
            self.rf_min_samples_fraction = Some(v);
        }
        if let Some(v) = file.rf_features_per_split {
            self.rf_features_per_split = Some(v);
        }
        if let Some(v) = file.rf_bootstrap {
            self.rf_bootstrap = v;
        }
        if let Some(a) = file.architecture {
            self.architecture = a.parse()?;
        }
        if let Some(o) = file.optimizer {
            self.optimizer = parse_optimizer(&o)?;
        }
        Ok(())
    }

    pub fn optimizer_config(&self) -> OptimizerConfig {
        let mut cfg = match self.optimizer {
            OptimizerKind::SgdMomentum => OptimizerConfig::sgd_momentum(self.lr, self.momentum),
            OptimizerKind::Adam => OptimizerConfig::adam(self.lr),
            OptimizerKind::AdamW => OptimizerConfig::adamw(self.lr, self.weight_decay),
        };
        cfg.weight_decay = self.weight_decay;
        cfg
    }

    pub fn dlae_config(&self, seed: u64) -> DlaeConfig {
        DlaeConfig {
            encoded_size: self.encoded_size,
            ae_optimizer: OptimizerConfig::adam(self.ae_lr),
            ae_epochs: self.ae_epochs,
            ae_batch_size: self.ae_batch_size,
            architecture: self.architecture,
            optimizer: self.optimizer_config(),
            epochs: self.epochs,
            batch_size: self.batch_size,
            class_weights: None,
            threshold: self.threshold,
            seed,
        }
    }

    pub fn rf_config(&self, seed: u64) -> RfConfig {
        RfConfig {
            n_trees: self.rf_trees,
            max_depth: self.rf_max_depth,
            min_samples: match self.rf_min_samples_fraction {
                Some(f) => MinSamples::Fraction(f),
                None => MinSamples::Count(self.rf_min_samples),
            },
            features_per_split: self.rf_features_per_split,
            bootstrap: self.rf_bootstrap,
            weighted_gini: false,
            seed,
        }
    }

    /// Serializes the effective configuration for the run manifest.
    pub fn manifest_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ratio": self.ratio,
            "test_fraction": self.test_fraction,
            "encoded_size": self.encoded_size,
            "ae_lr": self.ae_lr,
            "ae_epochs": self.ae_epochs,
            "ae_batch_size": self.ae_batch_size,
            "architecture": self.architecture.name(),
            "optimizer": match self.optimizer {
                OptimizerKind::SgdMomentum => "sgd",
                OptimizerKind::Adam => "adam",
                OptimizerKind::AdamW => "adamw",
            },
            "lr": self.lr,
            "momentum": self.momentum,
            "weight_decay": self.weight_decay,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "threshold": self.threshold,
            "rf_trees": self.rf_trees,
            "rf_max_depth": self.rf_max_depth,
            "rf_min_samples": self.rf_min_samples,
            "rf_min_samples_fraction": self.rf_min_samples_fraction,
            "rf_features_per_split": self.rf_features_per_split,
            "rf_bootstrap": self.rf_bootstrap,
            "seeds": self.seeds,
        })
    }
}
