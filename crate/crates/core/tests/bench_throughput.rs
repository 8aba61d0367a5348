//! Rough throughput probe for sizing test configurations. Run with
//! `cargo test -p prospect-core --test bench_throughput -- --ignored --nocapture`.

use prospect_core::nn::loss::{weighted_bce_loss, ClassWeights};
use prospect_core::nn::optim::{Optimizer, OptimizerConfig};
use prospect_core::nn::{Activation, DenseLayer, Network};
use prospect_core::rng;
use prospect_core::Tensor2D;
use rand::Rng;
use std::time::Instant;

#[test]
#[ignore]
fn bench_forward_backward() {
    let d = 66;
    let mut init = rng::stream(1, rng::purpose::WEIGHT_INIT, 0);
    let mut net = Network::new(vec![
        DenseLayer::new(d, 512, Activation::Relu, true, 0.5, &mut init).unwrap(),
        DenseLayer::new(512, 256, Activation::Relu, true, 0.5, &mut init).unwrap(),
        DenseLayer::new(256, 128, Activation::Relu, true, 0.5, &mut init).unwrap(),
        DenseLayer::new(128, 64, Activation::Relu, true, 0.5, &mut init).unwrap(),
        DenseLayer::new(64, 1, Activation::Sigmoid, false, 0.0, &mut init).unwrap(),
    ])
    .unwrap();
    let params = net.param_count();
    let batch = 512usize;
    let mut data_rng = rng::stream(2, rng::purpose::SYNTHETIC, 0);
    let x = Tensor2D::from_vec(
        batch,
        d,
        (0..batch * d)
            .map(|_| data_rng.gen_range(-1.0..1.0))
            .collect(),
    )
    .unwrap();
    let labels: Vec<u8> = (0..batch).map(|i| (i % 5 == 0) as u8).collect();
    let w = ClassWeights::new(1.0, 4.0).unwrap();
    let mut opt = Optimizer::new(OptimizerConfig::sgd_momentum(1e-3, 0.9)).unwrap();
    let mut drop_rng = rng::stream(3, rng::purpose::DROPOUT, 0);

    let steps = 40;
    let start = Instant::now();
    for _ in 0..steps {
        let (out, cache) = net.forward_train(&x, &mut drop_rng).unwrap();
        let (_, gl) = weighted_bce_loss(out.as_slice(), &labels, &w).unwrap();
        let gl = Tensor2D::from_vec(batch, 1, gl).unwrap();
        let grads = net.backward_from_logits(&cache, &gl).unwrap();
        opt.step(&mut net, &grads).unwrap();
    }
    let dt = start.elapsed().as_secs_f64();
    let rows = (steps * batch) as f64;
    // ~3 matmul-equivalents per row-pass (forward, dW, dX).
    let flops = rows * params as f64 * 2.0 * 3.0;
    println!(
        "params {params}, {:.1} rows/s, approx {:.2} GFLOP/s, {:.3} s total",
        rows / dt,
        flops / dt / 1e9,
        dt
    );

    let eval_start = Instant::now();
    for _ in 0..steps {
        let _ = net.forward_eval(&x).unwrap();
    }
    let edt = eval_start.elapsed().as_secs_f64();
    println!("eval {:.1} rows/s", rows / edt);
}
