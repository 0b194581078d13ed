//! Training loop: IRPM shuffle (online mode), then FFM → EM → BP → BPM per
//! batch, with the per-epoch MSE recorded.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mlp::network::{em, mse, MlpNetwork};

/// Any epoch MSE above this counts as divergence.
pub const DIVERGENCE_LIMIT: f32 = 1e6;

/// Paired inputs `Y^0` (P x ℕ) and targets `D` (M x ℕ), one sample per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Matrix,
    pub targets: Matrix,
    pub names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(inputs: Matrix, targets: Matrix) -> Result<Self> {
        if inputs.cols() != targets.cols() {
            return Err(Error::InvalidShape(format!(
                "{} input samples but {} target samples",
                inputs.cols(),
                targets.cols()
            )));
        }
        Ok(Self {
            inputs,
            targets,
            names: None,
        })
    }

    /// Builds a dataset from per-sample rows `(inputs, targets)`.
    pub fn from_samples(samples: &[(Vec<f32>, Vec<f32>)]) -> Result<Self> {
        let ins: Vec<&[f32]> = samples.iter().map(|(i, _)| i.as_slice()).collect();
        let outs: Vec<&[f32]> = samples.iter().map(|(_, o)| o.as_slice()).collect();
        Self::new(Matrix::from_rows(&ins)?.transpose(), Matrix::from_rows(&outs)?.transpose())
    }

    pub fn len(&self) -> usize {
        self.inputs.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input_width(&self) -> usize {
        self.inputs.rows()
    }

    pub fn target_width(&self) -> usize {
        self.targets.rows()
    }

    /// Reorders samples; `order[i]` is the source column of the new column `i`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        Ok(Self {
            inputs: self.inputs.select_columns(order)?,
            targets: self.targets.select_columns(order)?,
            names: self
                .names
                .as_ref()
                .map(|n| order.iter().map(|&i| n[i].clone()).collect()),
        })
    }

    pub fn with_targets(&self, targets: Matrix) -> Result<Self> {
        let mut out = Self::new(self.inputs.clone(), targets)?;
        out.names = self.names.clone();
        Ok(out)
    }
}

/// Fisher–Yates column permutation drawn from `rng`, applied to inputs and targets jointly.
pub fn irpm_with(data: &Dataset, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(rng);
    data.permuted(&order)
}

/// Input random permutation with a fresh generator seeded by `seed`.
pub fn irpm(data: &Dataset, seed: u64) -> Result<Dataset> {
    irpm_with(data, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Fixed sample order.
    #[default]
    Batch,
    /// Samples reshuffled by IRPM at the start of every epoch.
    Online,
}

/// Hyperparameters. `batch_size` is the number of columns per weight update;
/// online training customarily uses 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub eta: f32,
    pub alpha: f32,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub mode: Mode,
    pub seed: u64,
    /// Stop once an epoch's MSE is at or below this. Non-finite disables it.
    pub mse_stop: Option<f32>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            eta: 0.9,
            alpha: 0.8,
            batch_size: 4,
            max_epochs: 2000,
            mode: Mode::Batch,
            seed: 0,
            mse_stop: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("learning rate must be > 0, got {}", self.eta)));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("momentum must be in [0, 1), got {}", self.alpha)));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// MSE of every epoch, measured on the errors that drove that epoch's updates.
    pub trace: Vec<f32>,
    /// MSE of the trained network over the whole dataset in its original order.
    pub final_mse: f32,
}

impl TrainReport {
    pub fn epochs(&self) -> usize {
        self.trace.len()
    }
}

/// One FFM → EM → BP → BPM iteration on a batch. Returns `trace(EᵀE)`.
pub fn train_step(net: &mut MlpNetwork, inputs: &Matrix, targets: &Matrix, eta: f32, alpha: f32) -> Result<f32> {
    step_checked(net, inputs, targets, eta, alpha, 0)
}

/// Stops before backpropagating non-finite activations, whose derivative is undefined.
fn step_checked(net: &mut MlpNetwork, inputs: &Matrix, targets: &Matrix, eta: f32, alpha: f32, epoch: usize) -> Result<f32> {
    let pass = net.forward(inputs)?;
    let error = em(pass.output(), targets)?;
    let sq = error.trace_product(&error)?;
    if !sq.is_finite() {
        return Err(Error::Diverged { epoch, mse: sq });
    }
    let grads = net.backprop_gradients(&pass, &error)?;
    net.bpm(&grads, &pass, eta, alpha)?;
    Ok(sq)
}

fn check_finite(epoch: usize, mse: f32) -> Result<()> {
    if !mse.is_finite() || mse > DIVERGENCE_LIMIT {
        return Err(Error::Diverged { epoch, mse });
    }
    Ok(())
}

/// MSE of `net` on the full dataset.
pub fn evaluate(net: &MlpNetwork, data: &Dataset) -> Result<f32> {
    let out = net.predict(&data.inputs)?;
    mse(&em(&out, &data.targets)?, data.len())
}

pub fn train(net: &mut MlpNetwork, data: &Dataset, config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    if data.input_width() != net.inputs() || data.target_width() != net.outputs() {
        return Err(Error::InvalidShape(format!(
            "dataset is {} -> {} but network is {} -> {}",
            data.input_width(),
            data.target_width(),
            net.inputs(),
            net.outputs()
        )));
    }

    let n = data.len();
    let batch = config.batch_size.min(n);
    let stop = config.mse_stop.filter(|t| t.is_finite());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trace = Vec::with_capacity(config.max_epochs);

    // Chunks are fixed in batch mode, so slice them once.
    let fixed_chunks = if config.mode == Mode::Batch {
        Some(chunk(data, batch)?)
    } else {
        None
    };

    for epoch in 0..config.max_epochs {
        let shuffled;
        let chunks = match &fixed_chunks {
            Some(c) => c,
            None => {
                shuffled = chunk(&irpm_with(data, &mut rng)?, batch)?;
                &shuffled
            }
        };
        let mut sq = 0.0f32;
        for (x, d) in chunks {
            sq += step_checked(net, x, d, config.eta, config.alpha, epoch)?;
        }
        let epoch_mse = sq / (2.0 * n as f32);
        check_finite(epoch, epoch_mse)?;
        trace.push(epoch_mse);
        if stop.is_some_and(|t| epoch_mse <= t) {
            break;
        }
    }

    let final_mse = evaluate(net, data)?;
    check_finite(trace.len(), final_mse)?;
    Ok(TrainReport { trace, final_mse })
}

fn chunk(data: &Dataset, batch: usize) -> Result<Vec<(Matrix, Matrix)>> {
    if batch >= data.len() {
        return Ok(vec![(data.inputs.clone(), data.targets.clone())]);
    }
    let cols: Vec<usize> = (0..data.len()).collect();
    cols.chunks(batch)
        .map(|c| Ok((data.inputs.select_columns(c)?, data.targets.select_columns(c)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> Dataset {
        Dataset::new(
            Matrix::from_rows(&[[0.0f32, 0.0, 1.0, 1.0], [0.0, 1.0, 0.0, 1.0]]).unwrap(),
            Matrix::from_rows(&[[0.0f32, 1.0, 1.0, 0.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn irpm_preserves_pairs_and_is_deterministic() {
        let data = Dataset::from_samples(
            &(0..9)
                .map(|i| (vec![i as f32, 10.0 * i as f32], vec![-(i as f32)]))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let a = irpm(&data, 42).unwrap();
        assert_eq!(a, irpm(&data, 42).unwrap());
        let mut seen: Vec<i32> = (0..9)
            .map(|s| {
                let x = a.inputs.get(0, s);
                assert_eq!(a.inputs.get(1, s), 10.0 * x);
                assert_eq!(a.targets.get(0, s), -x);
                x as i32
            })
            .collect();
        seen.sort();
        assert_eq!(seen, (0..9).collect::<Vec<_>>());

        let single = Dataset::from_samples(&[(vec![1.0], vec![2.0])]).unwrap();
        assert_eq!(irpm(&single, 3).unwrap(), single);
    }

    #[test]
    fn infinite_stop_runs_all_epochs() {
        let mut net = MlpNetwork::init(&[2, 2, 1], 0).unwrap();
        let cfg = TrainConfig {
            max_epochs: 37,
            mse_stop: Some(f32::INFINITY),
            ..TrainConfig::default()
        };
        let report = train(&mut net, &xor(), &cfg).unwrap();
        assert_eq!(report.epochs(), 37);
    }

    #[test]
    fn finite_stop_exits_early() {
        let mut net = MlpNetwork::init(&[2, 2, 1], 0).unwrap();
        let cfg = TrainConfig {
            max_epochs: 500,
            mse_stop: Some(1.0),
            ..TrainConfig::default()
        };
        assert_eq!(train(&mut net, &xor(), &cfg).unwrap().epochs(), 1);
    }

    #[test]
    fn fixed_point_when_targets_are_own_outputs() {
        let mut net = MlpNetwork::init(&[2, 3, 1], 5).unwrap();
        let data = xor();
        let own = data.with_targets(net.predict(&data.inputs).unwrap()).unwrap();
        let before = net.clone();
        let report = train(&mut net, &own, &TrainConfig { max_epochs: 20, ..Default::default() }).unwrap();
        assert!(report.trace.iter().all(|&m| m == 0.0));
        assert_eq!(net.weights(), before.weights());
    }

    #[test]
    fn singleton_batch_equals_online_step() {
        let data = Dataset::from_samples(&[(vec![0.3, -0.7], vec![0.8])]).unwrap();
        let mut a = MlpNetwork::init(&[2, 3, 1], 12).unwrap();
        let mut b = a.clone();
        let base = TrainConfig {
            max_epochs: 1,
            batch_size: 1,
            ..Default::default()
        };
        let ra = train(&mut a, &data, &base).unwrap();
        let rb = train(&mut b, &data, &TrainConfig { mode: Mode::Online, ..base }).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.trace[0].to_bits(), rb.trace[0].to_bits());
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut net = MlpNetwork::init(&[2, 2, 1], 0).unwrap();
        for cfg in [
            TrainConfig { eta: 0.0, ..Default::default() },
            TrainConfig { alpha: 1.0, ..Default::default() },
            TrainConfig { batch_size: 0, ..Default::default() },
        ] {
            assert!(matches!(train(&mut net, &xor(), &cfg), Err(Error::Config(_))));
        }
        let mut wide = MlpNetwork::init(&[3, 2, 1], 0).unwrap();
        assert!(matches!(train(&mut wide, &xor(), &TrainConfig::default()), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn nan_activations_report_divergence() {
        let mut net = MlpNetwork::init(&[2, 2, 1], 0).unwrap();
        net.weights_mut()[0].set(0, 1, f32::INFINITY);
        net.weights_mut()[0].set(0, 2, f32::NEG_INFINITY);
        match train(&mut net, &xor(), &TrainConfig::default()) {
            Err(Error::Diverged { epoch: 0, mse }) => assert!(mse.is_nan()),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn divergence_reports_epoch() {
        let mut net = MlpNetwork::init(&[1, 1], 0)
            .unwrap()
            .with_activation(0, crate::mlp::Activation::Linear);
        let data = Dataset::from_samples(&[(vec![50.0], vec![1.0]), (vec![-80.0], vec![0.0])]).unwrap();
        let cfg = TrainConfig {
            eta: 5.0,
            alpha: 0.0,
            max_epochs: 100,
            ..Default::default()
        };
        match train(&mut net, &data, &cfg) {
            Err(Error::Diverged { epoch, .. }) => assert!(epoch < 100),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn minibatch_epoch_mse_matches_full_batch_at_start() {
        // The first chunk is evaluated before any update, so epoch MSE for one
        // chunk of the whole set equals the plain MSE of the untrained net.
        let data = xor();
        let net = MlpNetwork::init(&[2, 2, 1], 3).unwrap();
        let expected = evaluate(&net, &data).unwrap();
        let mut trained = net.clone();
        let r = train(&mut trained, &data, &TrainConfig { max_epochs: 1, ..Default::default() }).unwrap();
        assert_eq!(r.trace[0], expected);
    }
}
