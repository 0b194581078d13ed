//! Independent reference implementations used as test oracles. Nothing here
//! calls into the matrix kernels under test.
#![allow(dead_code)]

use mlp_core::data::Fixture;
use mlp_core::mlp::{train, Activation, Dataset, MlpNetwork, TargetCodec, TrainConfig};
use mlp_core::Matrix;

pub type Dense = Vec<Vec<f64>>;

pub fn to_dense(m: &Matrix) -> Dense {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c) as f64).collect()).collect()
}

pub fn naive_product(a: &Dense, b: &Dense) -> Dense {
    let inner = b.len();
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn naive_hadamard(a: &Dense, b: &Dense) -> Dense {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).collect()).collect()
}

/// `trace(AᵀB)` computed literally: transpose, multiply, sum the diagonal.
pub fn naive_trace_of_transpose_product(a: &Dense, b: &Dense) -> f64 {
    let at: Dense = (0..a[0].len()).map(|c| a.iter().map(|r| r[c]).collect()).collect();
    let p = naive_product(&at, b);
    (0..p.len()).map(|i| p[i][i]).sum()
}

fn logistic(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Loss `Σ (d - y)² / (2N)` of a network given as f64 weight matrices.
/// `inputs[s]` and `targets[s]` hold sample `s`.
pub fn loss64(weights: &[Dense], activations: &[Activation], inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (x, d) in inputs.iter().zip(targets) {
        let mut y = x.clone();
        for (w, act) in weights.iter().zip(activations) {
            y = w
                .iter()
                .map(|row| {
                    let v = -row[0] + row[1..].iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
                    match act {
                        Activation::Sigmoid => logistic(v),
                        Activation::Linear => v,
                    }
                })
                .collect();
        }
        total += y.iter().zip(d).map(|(a, b)| (b - a).powi(2)).sum::<f64>();
    }
    total / (2.0 * inputs.len() as f64)
}

/// Samples of a dataset as per-sample f64 vectors.
pub fn samples(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.cols()).map(|s| m.column(s).into_iter().map(f64::from).collect()).collect()
}

/// Central finite differences of [`loss64`] for every weight.
pub fn numeric_gradients(net: &MlpNetwork, data: &Dataset, step: f64) -> Vec<Dense> {
    let base: Vec<Dense> = net.weights().iter().map(to_dense).collect();
    let (xs, ds) = (samples(&data.inputs), samples(&data.targets));
    let acts = net.activations();
    let mut out = Vec::new();
    for k in 0..base.len() {
        let mut layer = base[k].clone();
        for r in 0..layer.len() {
            for c in 0..layer[r].len() {
                let mut w = base.clone();
                w[k][r][c] += step;
                let plus = loss64(&w, acts, &xs, &ds);
                w[k][r][c] -= 2.0 * step;
                let minus = loss64(&w, acts, &xs, &ds);
                layer[r][c] = (plus - minus) / (2.0 * step);
            }
        }
        out.push(layer);
    }
    out
}

/// Gradients whose magnitudes are both below this are treated as agreeing:
/// the analytic path runs in binary32, whose rounding floor is of this order.
pub const GRADIENT_FLOOR: f64 = 1e-6;

#[derive(Debug, Default, Clone, Copy)]
pub struct GradientTally {
    pub coordinates: usize,
    pub agreeing: usize,
    pub below_floor: usize,
    pub worst_relative: f64,
}

impl GradientTally {
    pub fn merge(&mut self, other: GradientTally) {
        self.coordinates += other.coordinates;
        self.agreeing += other.agreeing;
        self.below_floor += other.below_floor;
        self.worst_relative = self.worst_relative.max(other.worst_relative);
    }

    pub fn fraction(&self) -> f64 {
        self.agreeing as f64 / self.coordinates as f64
    }
}

pub fn compare_gradients(net: &MlpNetwork, data: &Dataset, tolerance: f64) -> GradientTally {
    let pass = net.forward(&data.inputs).unwrap();
    let error = mlp_core::mlp::em(pass.output(), &data.targets).unwrap();
    let analytic = net.loss_gradients(&pass, &error).unwrap();
    let numeric = numeric_gradients(net, data, 1e-4);
    let mut t = GradientTally::default();
    for (a, n) in analytic.iter().zip(&numeric) {
        for (r, row) in n.iter().enumerate() {
            for (c, &nv) in row.iter().enumerate() {
                let av = a.get(r, c) as f64;
                let scale = av.abs().max(nv.abs());
                t.coordinates += 1;
                if scale < GRADIENT_FLOOR {
                    t.below_floor += 1;
                    t.agreeing += 1;
                    continue;
                }
                let rel = (av - nv).abs() / scale;
                t.worst_relative = t.worst_relative.max(rel);
                if rel < tolerance {
                    t.agreeing += 1;
                }
            }
        }
    }
    t
}

/// Trains on a fixture with targets mapped through a fitted codec, using the
/// whole dataset as one batch and default hyperparameters.
pub fn train_robot(fixture: Fixture, hidden: usize, seed: u64) -> (MlpNetwork, TargetCodec, f32) {
    let data = fixture.dataset().unwrap();
    let codec = TargetCodec::fit(&data.targets).unwrap();
    let encoded = data.with_targets(codec.encode(&data.targets)).unwrap();
    let mut net = MlpNetwork::init(&[3, hidden, 2], seed).unwrap();
    let cfg = TrainConfig {
        batch_size: data.len(),
        seed,
        ..TrainConfig::default()
    };
    let report = train(&mut net, &encoded, &cfg).unwrap();
    (net, codec, report.final_mse)
}
