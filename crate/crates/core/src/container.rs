//! Versioned binary container for model artifacts.
//!
//! Layout: magic bytes `PKNN`, format version (u16 LE), artifact kind (u8),
//! then a kind-specific body. Network stacks store a layer-spec table
//! (widths, activation ids, batch-norm flag and hyper-parameters, dropout
//! probability, frozen flag) followed by parameter blocks as IEEE-754
//! little-endian 32-bit floats in declaration order: weights, bias, then for
//! batch-norm layers gamma, beta, running mean, running variance.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::nn::{Activation, BatchNorm, DenseLayer, Network};
use crate::tensor::Tensor2D;

pub const MAGIC: [u8; 4] = *b"PKNN";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactKind {
    Stack,
    Autoencoder,
    Classifier,
    Forest,
    Snapshot,
}

impl ArtifactKind {
    fn code(self) -> u8 {
        match self {
            ArtifactKind::Stack => 1,
            ArtifactKind::Autoencoder => 2,
            ArtifactKind::Classifier => 3,
            ArtifactKind::Forest => 4,
            ArtifactKind::Snapshot => 5,
        }
    }

    fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            1 => ArtifactKind::Stack,
            2 => ArtifactKind::Autoencoder,
            3 => ArtifactKind::Classifier,
            4 => ArtifactKind::Forest,
            5 => ArtifactKind::Snapshot,
            other => return Err(Error::Format(format!("unknown artifact kind {other}"))),
        })
    }
}

pub fn write_header(w: &mut impl Write, kind: ArtifactKind) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[kind.code()])?;
    Ok(())
}

pub fn read_header(r: &mut impl Read) -> Result<ArtifactKind> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(Error::Format("bad magic bytes".to_string()));
    }
    let version = read_u16(r)?;
    if version != VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {version} (expected {VERSION})"
        )));
    }
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    ArtifactKind::from_code(kind[0])
}

pub fn write_u8(w: &mut impl Write, v: u8) -> Result<()> {
    w.write_all(&[v])?;
    Ok(())
}

pub fn read_u8(r: &mut impl Read) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

pub fn write_u16(w: &mut impl Write, v: u16) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub fn read_u16(r: &mut impl Read) -> Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

pub fn write_u32(w: &mut impl Write, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn write_f32(w: &mut impl Write, v: f32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub fn read_f32(r: &mut impl Read) -> Result<f32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(f32::from_le_bytes(b))
}

pub fn write_f64(w: &mut impl Write, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn write_string(w: &mut impl Write, s: &str) -> Result<()> {
    write_u32(w, s.len() as u32)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_string(r: &mut impl Read) -> Result<String> {
    let len = read_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::Format("invalid utf-8 string".to_string()))
}

fn write_f32_block(w: &mut impl Write, values: &[f64]) -> Result<()> {
    for &v in values {
        write_f32(w, v as f32)?;
    }
    Ok(())
}

fn read_f32_block(r: &mut impl Read, len: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(read_f32(r)? as f64);
    }
    Ok(out)
}

fn activation_code(a: Activation) -> u8 {
    match a {
        Activation::Identity => 0,
        Activation::Relu => 1,
        Activation::Sigmoid => 2,
    }
}

fn activation_from_code(code: u8) -> Result<Activation> {
    Ok(match code {
        0 => Activation::Identity,
        1 => Activation::Relu,
        2 => Activation::Sigmoid,
        other => return Err(Error::Format(format!("unknown activation id {other}"))),
    })
}

/// Writes a network stack body (no header).
pub fn write_network(w: &mut impl Write, net: &Network) -> Result<()> {
    write_u32(w, net.layers.len() as u32)?;
    for layer in &net.layers {
        write_u32(w, layer.in_width() as u32)?;
        write_u32(w, layer.out_width() as u32)?;
        write_u8(w, activation_code(layer.activation))?;
        write_u8(w, layer.batch_norm.is_some() as u8)?;
        if let Some(bn) = &layer.batch_norm {
            write_f64(w, bn.momentum)?;
            write_f64(w, bn.epsilon)?;
        }
        write_f64(w, layer.dropout_p)?;
        write_u8(w, layer.frozen as u8)?;
    }
    for layer in &net.layers {
        write_f32_block(w, layer.weights.as_slice())?;
        write_f32_block(w, &layer.bias)?;
        if let Some(bn) = &layer.batch_norm {
            write_f32_block(w, &bn.gamma)?;
            write_f32_block(w, &bn.beta)?;
            write_f32_block(w, &bn.running_mean)?;
            write_f32_block(w, &bn.running_var)?;
        }
    }
    Ok(())
}

struct LayerSpec {
    in_width: usize,
    out_width: usize,
    activation: Activation,
    bn: Option<(f64, f64)>,
    dropout_p: f64,
    frozen: bool,
}

/// Reads a network stack body (no header).
pub fn read_network(r: &mut impl Read) -> Result<Network> {
    let n_layers = read_u32(r)? as usize;
    if n_layers == 0 {
        return Err(Error::Format("network with zero layers".to_string()));
    }
    let mut specs = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let in_width = read_u32(r)? as usize;
        let out_width = read_u32(r)? as usize;
        let activation = activation_from_code(read_u8(r)?)?;
        let has_bn = read_u8(r)? != 0;
        let bn = if has_bn {
            let momentum = read_f64(r)?;
            let epsilon = read_f64(r)?;
            Some((momentum, epsilon))
        } else {
            None
        };
        let dropout_p = read_f64(r)?;
        let frozen = read_u8(r)? != 0;
        specs.push(LayerSpec {
            in_width,
            out_width,
            activation,
            bn,
            dropout_p,
            frozen,
        });
    }
    let mut layers = Vec::with_capacity(n_layers);
    for spec in specs {
        let weights = Tensor2D::from_vec(
            spec.in_width,
            spec.out_width,
            read_f32_block(r, spec.in_width * spec.out_width)?,
        )?;
        let bias = read_f32_block(r, spec.out_width)?;
        let batch_norm = if let Some((momentum, epsilon)) = spec.bn {
            let mut bn = BatchNorm::new(spec.out_width, momentum, epsilon)?;
            bn.gamma = read_f32_block(r, spec.out_width)?;
            bn.beta = read_f32_block(r, spec.out_width)?;
            bn.running_mean = read_f32_block(r, spec.out_width)?;
            bn.running_var = read_f32_block(r, spec.out_width)?;
            Some(bn)
        } else {
            None
        };
        layers.push(DenseLayer {
            weights,
            bias,
            activation: spec.activation,
            batch_norm,
            dropout_p: spec.dropout_p,
            frozen: spec.frozen,
        });
    }
    Network::new(layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn header_round_trip_and_bad_magic() {
        let mut buf = Vec::new();
        write_header(&mut buf, ArtifactKind::Classifier).unwrap();
        assert_eq!(&buf[..4], b"PKNN");
        let kind = read_header(&mut buf.as_slice()).unwrap();
        assert_eq!(kind, ArtifactKind::Classifier);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_header(&mut bad.as_slice()).is_err());
    }

    #[test]
    fn network_round_trip_preserves_eval_outputs_within_f32() {
        let mut init = rng::stream(4, rng::purpose::WEIGHT_INIT, 0);
        let net = Network::new(vec![
            DenseLayer::new(6, 8, Activation::Relu, true, 0.5, &mut init).unwrap(),
            DenseLayer::new(8, 1, Activation::Sigmoid, false, 0.0, &mut init).unwrap(),
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_network(&mut buf, &net).unwrap();
        let restored = read_network(&mut buf.as_slice()).unwrap();

        let x = Tensor2D::from_rows(&[vec![0.2, -0.4, 1.0, 0.0, -1.2, 0.6]]).unwrap();
        let a = net.forward_eval(&x).unwrap();
        let b = restored.forward_eval(&x).unwrap();
        assert!((a.get(0, 0) - b.get(0, 0)).abs() < 1e-6);
        assert_eq!(restored.layers[0].dropout_p, 0.5);
        assert!(restored.layers[0].batch_norm.is_some());
    }

    #[test]
    fn truncated_input_is_a_format_error() {
        let mut init = rng::stream(4, rng::purpose::WEIGHT_INIT, 0);
        let net = Network::new(vec![DenseLayer::new(
            3,
            2,
            Activation::Identity,
            false,
            0.0,
            &mut init,
        )
        .unwrap()])
        .unwrap();
        let mut buf = Vec::new();
        write_network(&mut buf, &net).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_network(&mut buf.as_slice()).is_err());
    }
}
