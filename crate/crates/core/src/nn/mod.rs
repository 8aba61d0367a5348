//! Minimal dense-network engine: layer stacks with optional batch
//! normalization and inverted dropout, exact analytic gradients, and the
//! optimizers used for training.
//!
//! Layer order inside a [`DenseLayer`] is fixed: linear -> batch norm ->
//! activation -> dropout. Eval mode uses running batch-norm statistics and
//! skips dropout entirely, so an eval forward pass is a pure function of the
//! parameters.

pub mod loss;
pub mod optim;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::Tensor2D;

/// Element-wise activation applied after the (optionally normalized) linear
/// transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative expressed in terms of the activation *output*.
    #[inline]
    fn grad_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
        }
    }
}

/// Learned affine rescaling over per-feature batch statistics.
///
/// Running statistics are updated in train mode as
/// `running <- momentum * running + (1 - momentum) * batch` and used verbatim
/// in eval mode. Variances are biased (divide by N).
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNorm {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub momentum: f64,
    pub epsilon: f64,
}

impl BatchNorm {
    pub fn new(width: usize, momentum: f64, epsilon: f64) -> Result<Self> {
        if !(0.0 < momentum && momentum < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "batch-norm momentum must be in (0,1), got {momentum}"
            )));
        }
        if epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "batch-norm epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(BatchNorm {
            gamma: vec![1.0; width],
            beta: vec![0.0; width],
            running_mean: vec![0.0; width],
            running_var: vec![1.0; width],
            momentum,
            epsilon,
        })
    }
}

pub const DEFAULT_BN_MOMENTUM: f64 = 0.9;
pub const DEFAULT_BN_EPSILON: f64 = 1e-5;

/// One dense layer: linear transform, optional batch norm, activation,
/// optional inverted dropout.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    /// Weight matrix, `in_width x out_width`.
    pub weights: Tensor2D,
    pub bias: Vec<f64>,
    pub activation: Activation,
    pub batch_norm: Option<BatchNorm>,
    pub dropout_p: f64,
    /// Frozen layers receive no parameter gradients and no optimizer updates.
    pub frozen: bool,
}

impl DenseLayer {
    /// He-style uniform init (`U(-sqrt(6/fan_in), sqrt(6/fan_in))`), zero bias.
    pub fn new(
        in_width: usize,
        out_width: usize,
        activation: Activation,
        batch_norm: bool,
        dropout_p: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        if in_width == 0 || out_width == 0 {
            return Err(Error::InvalidConfig(
                "layer widths must be positive".to_string(),
            ));
        }
        if !(0.0..1.0).contains(&dropout_p) {
            return Err(Error::InvalidConfig(format!(
                "dropout probability must be in [0,1), got {dropout_p}"
            )));
        }
        let limit = (6.0 / in_width as f64).sqrt();
        let mut weights = Tensor2D::zeros(in_width, out_width);
        for w in weights.as_mut_slice() {
            *w = rng.gen_range(-limit..limit);
        }
        let batch_norm = if batch_norm {
            Some(BatchNorm::new(
                out_width,
                DEFAULT_BN_MOMENTUM,
                DEFAULT_BN_EPSILON,
            )?)
        } else {
            None
        };
        Ok(DenseLayer {
            weights,
            bias: vec![0.0; out_width],
            activation,
            batch_norm,
            dropout_p,
            frozen: false,
        })
    }

    #[inline]
    pub fn in_width(&self) -> usize {
        self.weights.rows()
    }

    #[inline]
    pub fn out_width(&self) -> usize {
        self.weights.cols()
    }

    pub fn param_count(&self) -> usize {
        let mut n = self.weights.rows() * self.weights.cols() + self.bias.len();
        if self.batch_norm.is_some() {
            n += 2 * self.out_width();
        }
        n
    }
}

struct BnCache {
    xhat: Tensor2D,
    inv_std: Vec<f64>,
}

struct LayerCache {
    input: Tensor2D,
    bn: Option<BnCache>,
    /// Activation output, before dropout.
    post_act: Tensor2D,
    /// Mask entries are 0 or 1/(1-p).
    dropout_mask: Option<Tensor2D>,
}

/// Activation record from a train-mode forward pass, consumed by
/// [`Network::backward`].
pub struct ForwardCache {
    layers: Vec<LayerCache>,
}

/// Per-layer parameter gradients. `None` entries correspond to frozen layers,
/// which are left untouched.
pub struct Gradients {
    pub layers: Vec<Option<LayerGrads>>,
}

pub struct LayerGrads {
    pub d_weights: Tensor2D,
    pub d_bias: Vec<f64>,
    pub d_gamma: Option<Vec<f64>>,
    pub d_beta: Option<Vec<f64>>,
}

impl Gradients {
    pub fn is_finite(&self) -> bool {
        self.layers.iter().flatten().all(|g| {
            g.d_weights.is_finite()
                && g.d_bias.iter().all(|v| v.is_finite())
                && g.d_gamma.iter().flatten().all(|v| v.is_finite())
                && g.d_beta.iter().flatten().all(|v| v.is_finite())
        })
    }
}

/// A stack of dense layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layers: Vec<DenseLayer>,
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig("network needs >= 1 layer".to_string()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_width() != pair[1].in_width() {
                return Err(Error::ShapeMismatch {
                    op: "Network::new",
                    expected: format!("{} inputs", pair[0].out_width()),
                    got: format!("{} inputs", pair[1].in_width()),
                });
            }
        }
        Ok(Network { layers })
    }

    pub fn in_width(&self) -> usize {
        self.layers[0].in_width()
    }

    pub fn out_width(&self) -> usize {
        self.layers.last().unwrap().out_width()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    pub fn set_frozen(&mut self, frozen: bool) {
        for layer in &mut self.layers {
            layer.frozen = frozen;
        }
    }

    fn check_input(&self, batch: &Tensor2D) -> Result<()> {
        if batch.cols() != self.in_width() {
            return Err(Error::ShapeMismatch {
                op: "Network::forward",
                expected: format!("{} input cols", self.in_width()),
                got: format!("{} input cols", batch.cols()),
            });
        }
        Ok(())
    }

    /// Train-mode forward pass. Updates running batch-norm statistics and
    /// draws dropout masks from `rng`; returns the output and the activation
    /// record needed by [`Network::backward`].
    pub fn forward_train(
        &mut self,
        batch: &Tensor2D,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Tensor2D, ForwardCache)> {
        self.check_input(batch)?;
        let n = batch.rows();
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut current = batch.clone();
        for layer in &mut self.layers {
            let input = current;
            let mut z = input.matmul(&layer.weights)?;
            z.add_row_vector(&layer.bias)?;

            let bn_cache = if let Some(bn) = &mut layer.batch_norm {
                let width = z.cols();
                let mut mean = vec![0.0; width];
                let mut var = vec![0.0; width];
                for r in 0..n {
                    for (m, &x) in mean.iter_mut().zip(z.row(r)) {
                        *m += x;
                    }
                }
                for m in &mut mean {
                    *m /= n as f64;
                }
                for r in 0..n {
                    for c in 0..width {
                        let d = z.get(r, c) - mean[c];
                        var[c] += d * d;
                    }
                }
                for v in &mut var {
                    *v /= n as f64;
                }
                let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / (v + bn.epsilon).sqrt()).collect();
                let mut xhat = Tensor2D::zeros(n, width);
                for r in 0..n {
                    for c in 0..width {
                        let h = (z.get(r, c) - mean[c]) * inv_std[c];
                        xhat.set(r, c, h);
                        z.set(r, c, bn.gamma[c] * h + bn.beta[c]);
                    }
                }
                for c in 0..width {
                    bn.running_mean[c] =
                        bn.momentum * bn.running_mean[c] + (1.0 - bn.momentum) * mean[c];
                    bn.running_var[c] =
                        bn.momentum * bn.running_var[c] + (1.0 - bn.momentum) * var[c];
                }
                Some(BnCache { xhat, inv_std })
            } else {
                None
            };

            for v in z.as_mut_slice() {
                *v = layer.activation.apply(*v);
            }
            let post_act = z.clone();

            let dropout_mask = if layer.dropout_p > 0.0 {
                let keep = 1.0 - layer.dropout_p;
                let scale = 1.0 / keep;
                let mut mask = Tensor2D::zeros(z.rows(), z.cols());
                for (m, v) in mask.as_mut_slice().iter_mut().zip(z.as_mut_slice()) {
                    if rng.gen::<f64>() < keep {
                        *m = scale;
                        *v *= scale;
                    } else {
                        *m = 0.0;
                        *v = 0.0;
                    }
                }
                Some(mask)
            } else {
                None
            };

            z.check_finite("forward activation")?;
            caches.push(LayerCache {
                input,
                bn: bn_cache,
                post_act,
                dropout_mask,
            });
            current = z;
        }
        Ok((current, ForwardCache { layers: caches }))
    }

    /// Eval-mode forward pass: running batch-norm statistics, no dropout.
    pub fn forward_eval(&self, batch: &Tensor2D) -> Result<Tensor2D> {
        self.check_input(batch)?;
        let mut current = batch.clone();
        for layer in &self.layers {
            let mut z = current.matmul(&layer.weights)?;
            z.add_row_vector(&layer.bias)?;
            if let Some(bn) = &layer.batch_norm {
                for r in 0..z.rows() {
                    let row = z.row_mut(r);
                    for c in 0..row.len() {
                        let inv = 1.0 / (bn.running_var[c] + bn.epsilon).sqrt();
                        row[c] = bn.gamma[c] * (row[c] - bn.running_mean[c]) * inv + bn.beta[c];
                    }
                }
            }
            for v in z.as_mut_slice() {
                *v = layer.activation.apply(*v);
            }
            z.check_finite("forward activation")?;
            current = z;
        }
        Ok(current)
    }

    fn check_cache(&self, cache: &ForwardCache, upstream: &Tensor2D) -> Result<()> {
        if cache.layers.len() != self.layers.len() {
            return Err(Error::ShapeMismatch {
                op: "Network::backward",
                expected: format!("cache for {} layers", self.layers.len()),
                got: format!("cache for {} layers", cache.layers.len()),
            });
        }
        for (layer, lc) in self.layers.iter().zip(&cache.layers) {
            if lc.input.cols() != layer.in_width() || lc.post_act.cols() != layer.out_width() {
                return Err(Error::ShapeMismatch {
                    op: "Network::backward",
                    expected: "cache shapes matching the network".to_string(),
                    got: "stale or mismatched cache".to_string(),
                });
            }
        }
        let last = cache.layers.last().unwrap();
        if upstream.rows() != last.post_act.rows() || upstream.cols() != last.post_act.cols() {
            return Err(Error::ShapeMismatch {
                op: "Network::backward",
                expected: format!("{}x{} upstream", last.post_act.rows(), last.post_act.cols()),
                got: format!("{}x{} upstream", upstream.rows(), upstream.cols()),
            });
        }
        Ok(())
    }

    /// Backpropagation from `dL/d(output)`.
    pub fn backward(&self, cache: &ForwardCache, upstream: &Tensor2D) -> Result<Gradients> {
        self.check_cache(cache, upstream)?;
        Ok(self
            .backward_inner(cache, upstream.clone(), false, false)?
            .0)
    }

    /// Backpropagation that also returns `dL/d(input)`, for chaining stacks.
    pub fn backward_with_input_grad(
        &self,
        cache: &ForwardCache,
        upstream: &Tensor2D,
    ) -> Result<(Gradients, Tensor2D)> {
        self.check_cache(cache, upstream)?;
        let (grads, input_grad) = self.backward_inner(cache, upstream.clone(), false, true)?;
        Ok((grads, input_grad.unwrap()))
    }

    /// Backpropagation from `dL/d(pre-activation)` of the final layer. Used
    /// when the loss gradient is taken directly with respect to the logits;
    /// the final layer must have no batch norm and no dropout.
    pub fn backward_from_logits(
        &self,
        cache: &ForwardCache,
        upstream: &Tensor2D,
    ) -> Result<Gradients> {
        let last = self.layers.last().unwrap();
        if last.batch_norm.is_some() || last.dropout_p > 0.0 {
            return Err(Error::InvalidConfig(
                "backward_from_logits requires a plain final layer".to_string(),
            ));
        }
        self.check_cache(cache, upstream)?;
        Ok(self.backward_inner(cache, upstream.clone(), true, false)?.0)
    }

    fn backward_inner(
        &self,
        cache: &ForwardCache,
        mut upstream: Tensor2D,
        skip_last_activation: bool,
        want_input_grad: bool,
    ) -> Result<(Gradients, Option<Tensor2D>)> {
        let mut grads: Vec<Option<LayerGrads>> = Vec::with_capacity(self.layers.len());
        grads.resize_with(self.layers.len(), || None);

        for (idx, (layer, lc)) in self.layers.iter().zip(&cache.layers).enumerate().rev() {
            // Dropout: reuse the forward mask.
            if let Some(mask) = &lc.dropout_mask {
                for (u, &m) in upstream.as_mut_slice().iter_mut().zip(mask.as_slice()) {
                    *u *= m;
                }
            }

            // Activation.
            let is_last = idx == self.layers.len() - 1;
            if !(is_last && skip_last_activation) {
                for (u, &a) in upstream
                    .as_mut_slice()
                    .iter_mut()
                    .zip(lc.post_act.as_slice())
                {
                    *u *= layer.activation.grad_from_output(a);
                }
            }

            // Batch norm.
            let mut bn_grads: Option<(Vec<f64>, Vec<f64>)> = None;
            if let Some(bn) = &layer.batch_norm {
                let bc = lc.bn.as_ref().ok_or(Error::ShapeMismatch {
                    op: "Network::backward",
                    expected: "batch-norm cache".to_string(),
                    got: "missing batch-norm cache".to_string(),
                })?;
                let n = upstream.rows();
                let width = upstream.cols();
                let mut d_gamma = vec![0.0; width];
                let mut d_beta = vec![0.0; width];
                let mut sum_dxhat = vec![0.0; width];
                let mut sum_dxhat_xhat = vec![0.0; width];
                for r in 0..n {
                    let urow = upstream.row(r);
                    let hrow = bc.xhat.row(r);
                    for c in 0..width {
                        d_gamma[c] += urow[c] * hrow[c];
                        d_beta[c] += urow[c];
                        let dxh = urow[c] * bn.gamma[c];
                        sum_dxhat[c] += dxh;
                        sum_dxhat_xhat[c] += dxh * hrow[c];
                    }
                }
                let nf = n as f64;
                for r in 0..n {
                    for c in 0..width {
                        let dxh = upstream.get(r, c) * bn.gamma[c];
                        let dz = (bc.inv_std[c] / nf)
                            * (nf * dxh - sum_dxhat[c] - bc.xhat.get(r, c) * sum_dxhat_xhat[c]);
                        upstream.set(r, c, dz);
                    }
                }
                bn_grads = Some((d_gamma, d_beta));
            }

            // Linear.
            if !layer.frozen {
                let d_weights = lc.input.matmul_at_b(&upstream)?;
                let d_bias = upstream.col_sums();
                let (d_gamma, d_beta) = match bn_grads {
                    Some((g, b)) => (Some(g), Some(b)),
                    None => (None, None),
                };
                grads[idx] = Some(LayerGrads {
                    d_weights,
                    d_bias,
                    d_gamma,
                    d_beta,
                });
            }
            // The first layer's input gradient is computed only on request.
            if idx > 0 || want_input_grad {
                upstream = upstream.matmul_abt(&layer.weights)?;
            }
        }
        let input_grad = want_input_grad.then_some(upstream);
        Ok((Gradients { layers: grads }, input_grad))
    }
}
