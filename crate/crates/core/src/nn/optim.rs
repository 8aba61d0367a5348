//! Parameter update rules: classical SGD with momentum, Adam, and AdamW.
//!
//! SGD momentum uses the classical form `v <- mu v + g; p <- p - lr v`
//! (locked in by the recurrence-trace test below). Adam and AdamW follow the
//! standard bias-corrected recurrences; AdamW applies decoupled weight decay.

use crate::error::{Error, Result};
use crate::nn::{Gradients, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    SgdMomentum,
    Adam,
    AdamW,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    pub momentum: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl OptimizerConfig {
    pub fn sgd_momentum(learning_rate: f64, momentum: f64) -> Self {
        OptimizerConfig {
            kind: OptimizerKind::SgdMomentum,
            learning_rate,
            momentum,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.0,
        }
    }

    pub fn adam(learning_rate: f64) -> Self {
        OptimizerConfig {
            kind: OptimizerKind::Adam,
            learning_rate,
            momentum: 0.0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.0,
        }
    }

    pub fn adamw(learning_rate: f64, weight_decay: f64) -> Self {
        OptimizerConfig {
            kind: OptimizerKind::AdamW,
            learning_rate,
            momentum: 0.0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig(format!(
                "momentum must be in [0,1), got {}",
                self.momentum
            )));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::InvalidConfig(
                "adam betas must be in [0,1)".to_string(),
            ));
        }
        if self.eps <= 0.0 || self.weight_decay < 0.0 {
            return Err(Error::InvalidConfig(
                "adam eps must be positive and weight decay non-negative".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
struct ParamState {
    m: Vec<f64>,
    v: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
struct LayerState {
    weights: ParamState,
    bias: ParamState,
    gamma: ParamState,
    beta: ParamState,
}

/// Optimizer state for one network. State slots are allocated lazily on the
/// first step and keyed by layer index, so the same network must be passed to
/// every step.
#[derive(Debug)]
pub struct Optimizer {
    cfg: OptimizerConfig,
    t: u64,
    layers: Vec<LayerState>,
}

impl Optimizer {
    pub fn new(cfg: OptimizerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Optimizer {
            cfg,
            t: 0,
            layers: Vec::new(),
        })
    }

    pub fn step(&mut self, net: &mut Network, grads: &Gradients) -> Result<()> {
        if grads.layers.len() != net.layers.len() {
            return Err(Error::ShapeMismatch {
                op: "Optimizer::step",
                expected: format!("{} layer gradients", net.layers.len()),
                got: format!("{}", grads.layers.len()),
            });
        }
        if !grads.is_finite() {
            return Err(Error::NonFinite("gradient"));
        }
        if self.layers.is_empty() {
            self.layers = vec![LayerState::default(); net.layers.len()];
        }
        self.t += 1;
        let cfg = self.cfg;
        let t = self.t;
        for ((layer, grad), state) in net
            .layers
            .iter_mut()
            .zip(&grads.layers)
            .zip(&mut self.layers)
        {
            let Some(g) = grad else { continue };
            if layer.frozen {
                continue;
            }
            update_params(
                &cfg,
                t,
                layer.weights.as_mut_slice(),
                g.d_weights.as_slice(),
                &mut state.weights,
            );
            update_params(&cfg, t, &mut layer.bias, &g.d_bias, &mut state.bias);
            if let (Some(bn), Some(dg), Some(db)) = (&mut layer.batch_norm, &g.d_gamma, &g.d_beta) {
                update_params(&cfg, t, &mut bn.gamma, dg, &mut state.gamma);
                update_params(&cfg, t, &mut bn.beta, db, &mut state.beta);
            }
        }
        Ok(())
    }
}

fn update_params(
    cfg: &OptimizerConfig,
    t: u64,
    params: &mut [f64],
    grads: &[f64],
    state: &mut ParamState,
) {
    debug_assert_eq!(params.len(), grads.len());
    if state.m.len() != params.len() {
        state.m = vec![0.0; params.len()];
        if cfg.kind != OptimizerKind::SgdMomentum {
            state.v = vec![0.0; params.len()];
        }
    }
    match cfg.kind {
        OptimizerKind::SgdMomentum => {
            for ((p, &g), v) in params.iter_mut().zip(grads).zip(&mut state.m) {
                *v = cfg.momentum * *v + g;
                *p -= cfg.learning_rate * *v;
            }
        }
        OptimizerKind::Adam | OptimizerKind::AdamW => {
            let bc1 = 1.0 - cfg.beta1.powi(t as i32);
            let bc2 = 1.0 - cfg.beta2.powi(t as i32);
            for (i, (p, &g)) in params.iter_mut().zip(grads).enumerate() {
                let m = &mut state.m[i];
                let v = &mut state.v[i];
                *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
                *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                let mut delta = cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.eps);
                if cfg.kind == OptimizerKind::AdamW {
                    delta += cfg.learning_rate * cfg.weight_decay * *p;
                }
                *p -= delta;
            }
        }
    }
}
