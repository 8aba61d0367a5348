//! Training losses: class-weighted binary cross entropy and mean squared
//! reconstruction error, each returning the exact analytic gradient.

use crate::error::{Error, Result};
use crate::tensor::Tensor2D;

/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` before any log.
pub const PROB_EPS: f64 = 1e-7;

/// Per-class loss multipliers, set to inverse class frequency when built from
/// a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassWeights {
    pub w0: f64,
    pub w1: f64,
}

impl ClassWeights {
    pub fn new(w0: f64, w1: f64) -> Result<Self> {
        if w0 <= 0.0 || w1 <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "class weights must be positive, got w0={w0} w1={w1}"
            )));
        }
        Ok(ClassWeights { w0, w1 })
    }

    pub fn balanced() -> Self {
        ClassWeights { w0: 1.0, w1: 1.0 }
    }

    /// Pure inverse frequency: `w_c = n / n_c`.
    pub fn inverse_frequency(labels: &[u8]) -> Result<Self> {
        let n = labels.len() as f64;
        let n1 = labels.iter().filter(|&&y| y == 1).count() as f64;
        let n0 = n - n1;
        if n0 == 0.0 || n1 == 0.0 {
            return Err(Error::InvalidConfig(
                "inverse-frequency weights need both classes present".to_string(),
            ));
        }
        Ok(ClassWeights {
            w0: n / n0,
            w1: n / n1,
        })
    }
}

#[inline]
pub fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

/// Class-weighted binary cross entropy.
///
/// `loss = -(1/N) sum_i [w1 y_i log p_i + w0 (1 - y_i) log(1 - p_i)]`
///
/// The returned gradient is taken with respect to the *logits* (the sigmoid
/// pre-activations): `d/da_i = (w0 (1 - y_i) p_i - w1 y_i (1 - p_i)) / N`.
pub fn weighted_bce_loss(p: &[f64], y: &[u8], w: &ClassWeights) -> Result<(f64, Vec<f64>)> {
    if p.is_empty() {
        return Err(Error::EmptyInput("weighted_bce_loss"));
    }
    if p.len() != y.len() {
        return Err(Error::ShapeMismatch {
            op: "weighted_bce_loss",
            expected: format!("{} labels", p.len()),
            got: format!("{} labels", y.len()),
        });
    }
    let n = p.len() as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(p.len());
    for (&pi, &yi) in p.iter().zip(y) {
        let pc = clamp_prob(pi);
        if yi == 1 {
            loss -= w.w1 * pc.ln();
            grad.push(-w.w1 * (1.0 - pc) / n);
        } else {
            loss -= w.w0 * (1.0 - pc).ln();
            grad.push(w.w0 * pc / n);
        }
    }
    loss /= n;
    if !loss.is_finite() {
        return Err(Error::NonFinite("weighted_bce_loss"));
    }
    Ok((loss, grad))
}

/// Mean squared reconstruction error over all entries, with gradient
/// `2 (x' - x) / count` with respect to the reconstruction `x'`.
pub fn mse_reconstruction_loss(x: &Tensor2D, x_prime: &Tensor2D) -> Result<(f64, Tensor2D)> {
    if x.rows() != x_prime.rows() || x.cols() != x_prime.cols() {
        return Err(Error::ShapeMismatch {
            op: "mse_reconstruction_loss",
            expected: format!("{}x{}", x.rows(), x.cols()),
            got: format!("{}x{}", x_prime.rows(), x_prime.cols()),
        });
    }
    let count = (x.rows() * x.cols()) as f64;
    if count == 0.0 {
        return Err(Error::EmptyInput("mse_reconstruction_loss"));
    }
    let mut loss = 0.0;
    let mut grad = Tensor2D::zeros(x.rows(), x.cols());
    for (i, (&a, &b)) in x.as_slice().iter().zip(x_prime.as_slice()).enumerate() {
        let d = b - a;
        loss += d * d;
        grad.as_mut_slice()[i] = 2.0 * d / count;
    }
    loss /= count;
    if !loss.is_finite() {
        return Err(Error::NonFinite("mse_reconstruction_loss"));
    }
    Ok((loss, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction_gives_near_zero_loss() {
        let p = vec![1.0, 0.0, 1.0];
        let y = vec![1u8, 0, 1];
        let w = ClassWeights::new(3.0, 7.0).unwrap();
        let (loss, _) = weighted_bce_loss(&p, &y, &w).unwrap();
        let bound = 7.0 * (1.0 - PROB_EPS).ln().abs();
        assert!(loss >= 0.0 && loss <= bound, "loss {loss}");
    }

    #[test]
    fn uniform_half_probabilities_give_ln2() {
        let (loss, _) = weighted_bce_loss(&[0.5, 0.5], &[1, 0], &ClassWeights::balanced()).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn weighted_half_probabilities_match_direct_formula() {
        let w = ClassWeights::new(1.0, 4.0).unwrap();
        let (loss, _) = weighted_bce_loss(&[0.5, 0.5], &[1, 0], &w).unwrap();
        assert!((loss - 2.5 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!((loss - 1.732868).abs() < 1e-6);
    }

    #[test]
    fn bce_gradient_reduces_to_p_minus_y_when_unweighted() {
        let p = vec![0.3, 0.8, 0.55];
        let y = vec![1u8, 0, 1];
        let (_, grad) = weighted_bce_loss(&p, &y, &ClassWeights::balanced()).unwrap();
        for i in 0..3 {
            let expect = (p[i] - y[i] as f64) / 3.0;
            assert!((grad[i] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn bce_rejects_empty_and_mismatched_inputs() {
        let w = ClassWeights::balanced();
        assert!(weighted_bce_loss(&[], &[], &w).is_err());
        assert!(weighted_bce_loss(&[0.5], &[1, 0], &w).is_err());
    }

    #[test]
    fn mse_zero_for_identical_inputs() {
        let x = Tensor2D::from_rows(&[vec![1.0, -2.0]]).unwrap();
        let (loss, grad) = mse_reconstruction_loss(&x, &x.clone()).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.as_slice().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn mse_unit_distance_single_row() {
        let x = Tensor2D::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let xp = Tensor2D::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let (loss, grad) = mse_reconstruction_loss(&x, &xp).unwrap();
        assert!((loss - 1.0).abs() < 1e-15);
        assert!((grad.get(0, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mse_matches_scalar_loop_oracle() {
        let mut rng_state = 0x2545f49u64;
        let mut next = move || {
            // Small xorshift, enough for test data.
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state % 10_000) as f64 / 5_000.0 - 1.0
        };
        let rows = 7;
        let cols = 5;
        let x = Tensor2D::from_vec(rows, cols, (0..rows * cols).map(|_| next()).collect()).unwrap();
        let xp =
            Tensor2D::from_vec(rows, cols, (0..rows * cols).map(|_| next()).collect()).unwrap();
        let (loss, _) = mse_reconstruction_loss(&x, &xp).unwrap();
        let mut expect = 0.0;
        for r in 0..rows {
            for c in 0..cols {
                let d = xp.get(r, c) - x.get(r, c);
                expect += d * d;
            }
        }
        expect /= (rows * cols) as f64;
        assert!((loss - expect).abs() < 1e-12);
    }

    #[test]
    fn mse_rejects_shape_mismatch() {
        let x = Tensor2D::zeros(2, 3);
        let xp = Tensor2D::zeros(3, 2);
        assert!(mse_reconstruction_loss(&x, &xp).is_err());
    }

    #[test]
    fn inverse_frequency_weights_balance_class_mass() {
        let labels = vec![1u8, 0, 0, 0, 0]; // 1 pos, 4 neg
        let w = ClassWeights::inverse_frequency(&labels).unwrap();
        assert!((w.w1 - 5.0).abs() < 1e-15);
        assert!((w.w0 - 1.25).abs() < 1e-15);
        assert!((w.w1 / w.w0 - 4.0).abs() < 1e-15);
    }
}
