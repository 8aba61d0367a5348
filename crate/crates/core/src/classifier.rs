//! Feed-forward classifier over the concatenation of raw features and their
//! frozen-encoder representation, trained with class-weighted binary cross
//! entropy.
//!
//! Hidden layers are linear -> batch norm -> ReLU -> dropout(0.5); the output
//! layer is a single sigmoid unit with neither.

use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::autoencoder::AutoencoderModel;
use crate::container::{self, ArtifactKind};
use crate::data::dataset::{LabeledDataset, Split};
use crate::error::{Error, Result};
use crate::nn::loss::{clamp_prob, weighted_bce_loss, ClassWeights};
use crate::nn::optim::{Optimizer, OptimizerConfig};
use crate::nn::{Activation, DenseLayer, Network};
use crate::rng;
use crate::tensor::Tensor2D;

/// Dropout probability on every hidden layer.
pub const HIDDEN_DROPOUT: f64 = 0.5;

/// Default classification threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Candidate feed-forward architectures, named by their first hidden width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    A512,
    A2048,
    A4096,
}

impl Architecture {
    /// Hidden widths (the output layer of width 1 is appended separately).
    pub fn hidden_widths(self) -> Vec<usize> {
        match self {
            Architecture::A512 => vec![512, 256, 128, 64],
            Architecture::A2048 => vec![2048, 1024, 512, 256, 128, 64],
            Architecture::A4096 => vec![4096, 64],
        }
    }

    pub fn all() -> [Architecture; 3] {
        [Architecture::A512, Architecture::A2048, Architecture::A4096]
    }

    pub fn name(self) -> &'static str {
        match self {
            Architecture::A512 => "a512",
            Architecture::A2048 => "a2048",
            Architecture::A4096 => "a4096",
        }
    }

    fn code(self) -> u8 {
        match self {
            Architecture::A512 => 0,
            Architecture::A2048 => 1,
            Architecture::A4096 => 2,
        }
    }

    fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            0 => Architecture::A512,
            1 => Architecture::A2048,
            2 => Architecture::A4096,
            other => return Err(Error::Format(format!("unknown architecture code {other}"))),
        })
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a512" | "512" => Ok(Architecture::A512),
            "a2048" | "2048" => Ok(Architecture::A2048),
            "a4096" | "4096" => Ok(Architecture::A4096),
            other => Err(Error::InvalidConfig(format!(
                "unknown architecture {other:?} (expected a512, a2048, or a4096)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub architecture: Architecture,
    pub optimizer: OptimizerConfig,
    pub batch_size: usize,
    pub epochs: usize,
    pub class_weights: ClassWeights,
    pub seed: u64,
}

impl TrainConfig {
    /// Reference defaults: architecture 4096, SGD momentum 0.0001/0.92,
    /// batch 256, 100 epochs.
    pub fn new(class_weights: ClassWeights, seed: u64) -> Self {
        TrainConfig {
            architecture: Architecture::A4096,
            optimizer: OptimizerConfig::sgd_momentum(1e-4, 0.92),
            batch_size: 256,
            epochs: 100,
            class_weights,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    pub encoder: AutoencoderModel,
    pub ffn: Network,
    pub architecture: Architecture,
}

impl ClassifierModel {
    /// Builds an untrained model over a frozen encoder.
    pub fn new(encoder: AutoencoderModel, architecture: Architecture, seed: u64) -> Result<Self> {
        if !encoder.frozen {
            return Err(Error::InvalidConfig(
                "encoder must be frozen before classifier construction".to_string(),
            ));
        }
        let input_width = encoder.input_width() + encoder.encoded_size;
        let mut init = rng::stream(seed, rng::purpose::WEIGHT_INIT, 1);
        let mut layers = Vec::new();
        let mut prev = input_width;
        for &w in &architecture.hidden_widths() {
            layers.push(DenseLayer::new(
                prev,
                w,
                Activation::Relu,
                true,
                HIDDEN_DROPOUT,
                &mut init,
            )?);
            prev = w;
        }
        layers.push(DenseLayer::new(
            prev,
            1,
            Activation::Sigmoid,
            false,
            0.0,
            &mut init,
        )?);
        Ok(ClassifierModel {
            encoder,
            ffn: Network::new(layers)?,
            architecture,
        })
    }

    pub fn input_width(&self) -> usize {
        self.encoder.input_width()
    }

    pub fn ffn_input_width(&self) -> usize {
        self.ffn.in_width()
    }

    /// Probability of label 1 per row: encodes the batch, concatenates
    /// `[x, x_e]`, and runs an eval-mode forward pass. Outputs are clamped
    /// away from 0 and 1.
    pub fn predict_proba(&self, x: &Tensor2D) -> Result<Vec<f64>> {
        if x.cols() != self.input_width() {
            return Err(Error::ShapeMismatch {
                op: "ClassifierModel::predict_proba",
                expected: format!("{} cols", self.input_width()),
                got: format!("{} cols", x.cols()),
            });
        }
        let code = self.encoder.encode_batch(x)?;
        let z = x.hcat(&code)?;
        let out = self.ffn.forward_eval(&z)?;
        Ok(out.as_slice().iter().map(|&p| clamp_prob(p)).collect())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        container::write_header(&mut w, ArtifactKind::Classifier)?;
        container::write_u8(&mut w, self.architecture.code())?;
        self.encoder.write_body(&mut w, false)?;
        container::write_network(&mut w, &self.ffn)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut r = BufReader::new(file);
        let kind = container::read_header(&mut r)?;
        if kind != ArtifactKind::Classifier {
            return Err(Error::Format(format!(
                "expected classifier, found {kind:?}"
            )));
        }
        let architecture = Architecture::from_code(container::read_u8(&mut r)?)?;
        let encoder = AutoencoderModel::read_body(&mut r)?;
        let ffn = container::read_network(&mut r)?;
        Ok(ClassifierModel {
            encoder,
            ffn,
            architecture,
        })
    }
}

/// Trains the feed-forward classifier on the dataset's train split with
/// minibatch gradient descent on the weighted BCE objective. The encoder is
/// applied once in eval mode to build `z = [x, x_e]`; it must be frozen and
/// receives no updates. Shuffling is reseeded per epoch from `cfg.seed`.
pub fn train_classifier(
    dataset: &LabeledDataset,
    encoder: &AutoencoderModel,
    cfg: &TrainConfig,
) -> Result<(ClassifierModel, Vec<f64>)> {
    if !encoder.frozen {
        return Err(Error::InvalidConfig(
            "encoder must be frozen before classifier training".to_string(),
        ));
    }
    if cfg.batch_size == 0 || cfg.epochs == 0 {
        return Err(Error::InvalidConfig(
            "epochs and batch size must be positive".to_string(),
        ));
    }
    let (x, labels, _) = dataset.subset(Split::Train);
    let n = x.rows();
    if n == 0 {
        return Err(Error::EmptyInput("train_classifier"));
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    if pos == 0 || pos == n {
        return Err(Error::InsufficientData(
            "training data must contain both classes".to_string(),
        ));
    }

    let mut model = ClassifierModel::new(encoder.clone(), cfg.architecture, cfg.seed)?;
    let code = model.encoder.encode_batch(&x)?;
    let z = x.hcat(&code)?;

    let mut opt = Optimizer::new(cfg.optimizer)?;
    let mut order: Vec<usize> = (0..n).collect();
    let mut trace = Vec::with_capacity(cfg.epochs);
    use rand::Rng;
    for epoch in 0..cfg.epochs {
        let mut shuffle_rng = rng::stream(cfg.seed, rng::purpose::EPOCH_SHUFFLE, epoch as u64);
        for i in 0..n {
            let j = shuffle_rng.gen_range(i..n);
            order.swap(i, j);
        }
        let mut dropout_rng = rng::stream(cfg.seed, rng::purpose::DROPOUT, epoch as u64);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let zb = z.select_rows(chunk);
            let yb: Vec<u8> = chunk.iter().map(|&i| labels[i]).collect();
            let (out, cache) = model.ffn.forward_train(&zb, &mut dropout_rng)?;
            let (loss, grad_logits) = weighted_bce_loss(out.as_slice(), &yb, &cfg.class_weights)
                .map_err(|e| match e {
                    Error::NonFinite(_) => Error::NonFinite("classifier training loss"),
                    other => other,
                })?;
            epoch_loss += loss;
            batches += 1;
            let gl = Tensor2D::from_vec(zb.rows(), 1, grad_logits)?;
            let grads = model.ffn.backward_from_logits(&cache, &gl)?;
            opt.step(&mut model.ffn, &grads)?;
        }
        trace.push(epoch_loss / batches as f64);
    }
    Ok((model, trace))
}

/// Thresholded labels: 1 iff probability >= threshold.
pub fn classify(probabilities: &[f64], threshold: f64) -> Result<Vec<u8>> {
    if !(0.0 < threshold && threshold < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "threshold must be in (0,1), got {threshold}"
        )));
    }
    Ok(probabilities
        .iter()
        .map(|&p| u8::from(p >= threshold))
        .collect())
}
