//! Symmetric autoencoder: encoder halving from a 256-wide first hidden layer
//! down to the encoded size, decoder mirrored back to the input width.
//! Trained on reconstruction error alone; after training the encoder is
//! frozen and supplies the compact representation consumed by the classifier.
//!
//! Hidden layers use ReLU; the bottleneck and the decoder output are
//! identity so encodings and reconstructions of z-scored features stay
//! unbounded. No batch norm or dropout anywhere in the stack, so train-mode
//! forward passes are deterministic.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::container::{self, ArtifactKind};
use crate::error::{Error, Result};
use crate::nn::loss::mse_reconstruction_loss;
use crate::nn::optim::{Optimizer, OptimizerConfig};
use crate::nn::{Activation, DenseLayer, Network};
use crate::rng;
use crate::tensor::Tensor2D;

/// Encoded sizes swept in the reference experiments.
pub const SWEEP_ENCODED_SIZES: [usize; 4] = [16, 32, 64, 128];

/// Default encoded size.
pub const DEFAULT_ENCODED_SIZE: usize = 32;

/// First hidden width of the encoder; subsequent widths halve until the
/// encoded size.
pub const FIRST_HIDDEN: usize = 256;

/// Encoder layer widths for a given encoded size: 256, 128, ... down to
/// `encoded_size`.
pub fn encoder_widths(encoded_size: usize) -> Result<Vec<usize>> {
    if encoded_size == 0 {
        return Err(Error::InvalidConfig(
            "encoded size must be positive".to_string(),
        ));
    }
    if encoded_size >= FIRST_HIDDEN {
        return Err(Error::InvalidConfig(format!(
            "encoded size {encoded_size} must be below the first hidden width {FIRST_HIDDEN}"
        )));
    }
    let mut widths = vec![FIRST_HIDDEN];
    let mut w = FIRST_HIDDEN;
    while w / 2 > encoded_size {
        w /= 2;
        widths.push(w);
    }
    widths.push(encoded_size);
    Ok(widths)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderModel {
    pub encoder: Network,
    pub decoder: Network,
    pub encoded_size: usize,
    pub frozen: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AeTrainConfig {
    pub encoded_size: usize,
    pub optimizer: OptimizerConfig,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for AeTrainConfig {
    fn default() -> Self {
        AeTrainConfig {
            encoded_size: DEFAULT_ENCODED_SIZE,
            optimizer: OptimizerConfig::adam(1e-3),
            epochs: 100,
            batch_size: 256,
            seed: 0,
        }
    }
}

impl AutoencoderModel {
    /// Builds an untrained model with seeded weights.
    pub fn new(input_width: usize, encoded_size: usize, seed: u64) -> Result<Self> {
        let widths = encoder_widths(encoded_size)?;
        let mut init = rng::stream(seed, rng::purpose::WEIGHT_INIT, 0);
        let mut enc_layers = Vec::new();
        let mut prev = input_width;
        for (i, &w) in widths.iter().enumerate() {
            let act = if i == widths.len() - 1 {
                Activation::Identity
            } else {
                Activation::Relu
            };
            enc_layers.push(DenseLayer::new(prev, w, act, false, 0.0, &mut init)?);
            prev = w;
        }
        let mut dec_layers = Vec::new();
        let mut dec_widths: Vec<usize> = widths.iter().rev().skip(1).copied().collect();
        dec_widths.push(input_width);
        for (i, &w) in dec_widths.iter().enumerate() {
            let act = if i == dec_widths.len() - 1 {
                Activation::Identity
            } else {
                Activation::Relu
            };
            dec_layers.push(DenseLayer::new(prev, w, act, false, 0.0, &mut init)?);
            prev = w;
        }
        Ok(AutoencoderModel {
            encoder: Network::new(enc_layers)?,
            decoder: Network::new(dec_layers)?,
            encoded_size,
            frozen: false,
        })
    }

    pub fn input_width(&self) -> usize {
        self.encoder.in_width()
    }

    /// Encoder layer widths (excluding the input width).
    pub fn encoder_layer_widths(&self) -> Vec<usize> {
        self.encoder
            .layers
            .iter()
            .map(DenseLayer::out_width)
            .collect()
    }

    pub fn decoder_layer_widths(&self) -> Vec<usize> {
        self.decoder
            .layers
            .iter()
            .map(DenseLayer::out_width)
            .collect()
    }

    /// Eval-mode encoding of a batch; rows map independently.
    pub fn encode_batch(&self, x: &Tensor2D) -> Result<Tensor2D> {
        self.encoder.forward_eval(x)
    }

    /// Freezes the encoder (and decoder): subsequent backward passes produce
    /// no parameter updates. Idempotent.
    pub fn freeze(&mut self) {
        self.encoder.set_frozen(true);
        self.decoder.set_frozen(true);
        self.frozen = true;
    }

    /// Flat copy of all encoder parameter bits, for freeze-contract checks.
    pub fn encoder_param_bits(&self) -> Vec<u64> {
        self.encoder
            .layers
            .iter()
            .flat_map(|l| l.weights.as_slice().iter().chain(l.bias.iter()))
            .map(|v| v.to_bits())
            .collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        container::write_header(&mut w, ArtifactKind::Autoencoder)?;
        self.write_body(&mut w, true)?;
        w.flush()?;
        Ok(())
    }

    /// Encoder-only export; the decoder is not needed at inference.
    pub fn save_encoder_only(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        container::write_header(&mut w, ArtifactKind::Autoencoder)?;
        self.write_body(&mut w, false)?;
        w.flush()?;
        Ok(())
    }

    pub(crate) fn write_body(&self, w: &mut impl Write, with_decoder: bool) -> Result<()> {
        container::write_u32(w, self.encoded_size as u32)?;
        container::write_u8(w, self.frozen as u8)?;
        container::write_u8(w, with_decoder as u8)?;
        container::write_u8(w, 0)?; // role tag: encoder
        container::write_network(w, &self.encoder)?;
        if with_decoder {
            container::write_u8(w, 1)?; // role tag: decoder
            container::write_network(w, &self.decoder)?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut r = BufReader::new(file);
        let kind = container::read_header(&mut r)?;
        if kind != ArtifactKind::Autoencoder {
            return Err(Error::Format(format!(
                "expected autoencoder, found {kind:?}"
            )));
        }
        Self::read_body(&mut r)
    }

    pub(crate) fn read_body(r: &mut impl Read) -> Result<Self> {
        let encoded_size = container::read_u32(r)? as usize;
        let frozen = container::read_u8(r)? != 0;
        let with_decoder = container::read_u8(r)? != 0;
        if container::read_u8(r)? != 0 {
            return Err(Error::Format("expected encoder role tag".to_string()));
        }
        let encoder = container::read_network(r)?;
        let decoder = if with_decoder {
            if container::read_u8(r)? != 1 {
                return Err(Error::Format("expected decoder role tag".to_string()));
            }
            container::read_network(r)?
        } else {
            // Placeholder single identity-like layer; decoder is absent in
            // encoder-only exports and never used for scoring.
            let mut init = rng::stream(0, rng::purpose::WEIGHT_INIT, 0);
            Network::new(vec![DenseLayer::new(
                encoded_size,
                encoder.in_width(),
                Activation::Identity,
                false,
                0.0,
                &mut init,
            )?])?
        };
        Ok(AutoencoderModel {
            encoder,
            decoder,
            encoded_size,
            frozen,
        })
    }
}

/// Trains an autoencoder on standardized features by minibatch gradient
/// descent on the reconstruction loss. Returns the model (unfrozen) and the
/// per-epoch mean training loss.
pub fn train_autoencoder(
    features: &Tensor2D,
    cfg: &AeTrainConfig,
) -> Result<(AutoencoderModel, Vec<f64>)> {
    if features.rows() == 0 {
        return Err(Error::EmptyInput("train_autoencoder"));
    }
    if features.cols() < cfg.encoded_size {
        return Err(Error::InvalidConfig(format!(
            "input width {} below encoded size {}",
            features.cols(),
            cfg.encoded_size
        )));
    }
    if cfg.batch_size == 0 || cfg.epochs == 0 {
        return Err(Error::InvalidConfig(
            "epochs and batch size must be positive".to_string(),
        ));
    }
    let mut model = AutoencoderModel::new(features.cols(), cfg.encoded_size, cfg.seed)?;
    let mut enc_opt = Optimizer::new(cfg.optimizer)?;
    let mut dec_opt = Optimizer::new(cfg.optimizer)?;
    let n = features.rows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut trace = Vec::with_capacity(cfg.epochs);
    // Dropout is never used here, but forward_train wants a generator.
    let mut unused_rng = rng::stream(cfg.seed, rng::purpose::DROPOUT, 0);

    for epoch in 0..cfg.epochs {
        let mut shuffle_rng = rng::stream(cfg.seed, rng::purpose::EPOCH_SHUFFLE, epoch as u64);
        use rand::Rng;
        for i in 0..n {
            let j = shuffle_rng.gen_range(i..n);
            order.swap(i, j);
        }
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let batch = features.select_rows(chunk);
            let (code, enc_cache) = model.encoder.forward_train(&batch, &mut unused_rng)?;
            let (recon, dec_cache) = model.decoder.forward_train(&code, &mut unused_rng)?;
            let (loss, grad) = mse_reconstruction_loss(&batch, &recon).map_err(|e| match e {
                Error::NonFinite(_) => Error::NonFinite("autoencoder reconstruction loss"),
                other => other,
            })?;
            epoch_loss += loss;
            batches += 1;

            // Backprop through the decoder, then hand its input gradient to
            // the encoder.
            let (dec_grads, code_grad) =
                model.decoder.backward_with_input_grad(&dec_cache, &grad)?;
            let enc_grads = model.encoder.backward(&enc_cache, &code_grad)?;
            dec_opt.step(&mut model.decoder, &dec_grads)?;
            enc_opt.step(&mut model.encoder, &enc_grads)?;
        }
        trace.push(epoch_loss / batches as f64);
    }
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_halve_from_first_hidden() {
        assert_eq!(encoder_widths(32).unwrap(), vec![256, 128, 64, 32]);
        assert_eq!(encoder_widths(16).unwrap(), vec![256, 128, 64, 32, 16]);
        assert_eq!(encoder_widths(64).unwrap(), vec![256, 128, 64]);
        assert_eq!(encoder_widths(128).unwrap(), vec![256, 128]);
    }

    #[test]
    fn decoder_mirrors_encoder_for_all_sweep_sizes() {
        for &size in &SWEEP_ENCODED_SIZES {
            let model = AutoencoderModel::new(300, size, 1).unwrap();
            let enc = model.encoder_layer_widths();
            let dec = model.decoder_layer_widths();
            let mut mirrored: Vec<usize> = enc.iter().rev().skip(1).copied().collect();
            mirrored.push(300);
            assert_eq!(dec, mirrored, "size {size}");
            assert_eq!(*enc.last().unwrap(), size);
        }
    }

    #[test]
    fn encode_batch_has_encoded_width() {
        let model = AutoencoderModel::new(734, 32, 0).unwrap();
        let x = Tensor2D::zeros(3, 734);
        let code = model.encode_batch(&x).unwrap();
        assert_eq!(code.rows(), 3);
        assert_eq!(code.cols(), 32);
    }

    #[test]
    fn encode_batch_is_row_equivariant_and_pure() {
        let model = AutoencoderModel::new(10, 16, 3).unwrap();
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..10).map(|j| ((i * 10 + j) as f64).sin()).collect())
            .collect();
        let x = Tensor2D::from_rows(&rows).unwrap();
        let permuted = Tensor2D::from_rows(&[
            rows[2].clone(),
            rows[0].clone(),
            rows[3].clone(),
            rows[1].clone(),
        ])
        .unwrap();
        let a = model.encode_batch(&x).unwrap();
        let b = model.encode_batch(&permuted).unwrap();
        assert_eq!(a.row(2), b.row(0));
        assert_eq!(a.row(0), b.row(1));
        assert_eq!(a.row(3), b.row(2));
        assert_eq!(a.row(1), b.row(3));
        let again = model.encode_batch(&x).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn freeze_is_idempotent() {
        let mut model = AutoencoderModel::new(8, 16, 1).unwrap();
        // encoded 16 > input 8 is rejected at training time, not here.
        model.freeze();
        let bits = model.encoder_param_bits();
        model.freeze();
        assert!(model.frozen);
        assert_eq!(bits, model.encoder_param_bits());
    }

    #[test]
    fn rejects_input_narrower_than_code() {
        let features = Tensor2D::zeros(10, 8);
        let cfg = AeTrainConfig {
            encoded_size: 16,
            epochs: 1,
            batch_size: 4,
            ..Default::default()
        };
        assert!(train_autoencoder(&features, &cfg).is_err());
    }

    #[test]
    fn training_is_deterministic() {
        use rand::Rng;
        let mut data_rng = rng::stream(8, rng::purpose::SYNTHETIC, 0);
        let features = Tensor2D::from_vec(
            40,
            20,
            (0..800).map(|_| data_rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let cfg = AeTrainConfig {
            encoded_size: 16,
            epochs: 3,
            batch_size: 16,
            seed: 4,
            ..Default::default()
        };
        let (m1, t1) = train_autoencoder(&features, &cfg).unwrap();
        let (m2, t2) = train_autoencoder(&features, &cfg).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(m1.encoder_param_bits(), m2.encoder_param_bits());
    }

    #[test]
    fn save_load_round_trip_preserves_encodings() {
        use rand::Rng;
        let mut data_rng = rng::stream(9, rng::purpose::SYNTHETIC, 0);
        let features = Tensor2D::from_vec(
            30,
            20,
            (0..600).map(|_| data_rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let cfg = AeTrainConfig {
            encoded_size: 16,
            epochs: 2,
            batch_size: 8,
            seed: 2,
            ..Default::default()
        };
        let (mut model, _) = train_autoencoder(&features, &cfg).unwrap();
        model.freeze();
        let f = tempfile::NamedTempFile::new().unwrap();
        model.save(f.path()).unwrap();
        let loaded = AutoencoderModel::load(f.path()).unwrap();
        assert!(loaded.frozen);
        let a = model.encode_batch(&features).unwrap();
        let b = loaded.encode_batch(&features).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x - y).abs() < 1e-6);
        }

        let enc_only = tempfile::NamedTempFile::new().unwrap();
        model.save_encoder_only(enc_only.path()).unwrap();
        let loaded2 = AutoencoderModel::load(enc_only.path()).unwrap();
        let c = loaded2.encode_batch(&features).unwrap();
        for (x, y) in a.as_slice().iter().zip(c.as_slice()) {
            assert!((x - y).abs() < 1e-6);
        }
    }
}
