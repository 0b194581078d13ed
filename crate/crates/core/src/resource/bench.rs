//! Host-side timing of individual modules on the XOR-shaped network.
//!
//! Each module call is bracketed by a monotonic clock instead of a toggled pin.
//! A trial runs the module enough times to span [`TARGET_TRIAL`] and reports
//! the per-call average; the sample is the median over trials.

use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mlp::{em, ffm, ForwardPass, MlpNetwork};
use crate::resource::timing::{ModuleTag, TimingSample};

pub const MIN_REPS: usize = 5;
pub const DEFAULT_REPS: usize = 31;
pub const WARMUP_TRIALS: usize = 3;
const ORDER_SEED: u64 = 0x5eed;
/// Warm-up continues for at least this long, whatever the round count.
pub const WARMUP_MIN: Duration = Duration::from_millis(250);
pub const TARGET_TRIAL: Duration = Duration::from_micros(500);

/// Hidden-layer sizes of the reference table, `2, 4, .., 38`.
pub fn reference_h1_values() -> Vec<usize> {
    (2..=38).step_by(2).collect()
}

struct Fixture {
    net: MlpNetwork,
    pass: ForwardPass,
    targets: Matrix,
    error: Matrix,
    output_grad: Matrix,
}

impl Fixture {
    fn xor(h1: usize) -> Result<Self> {
        let net = MlpNetwork::init(&[2, h1, 1], 0)?;
        let inputs = Matrix::from_rows(&[[0.0f32, 0.0, 1.0, 1.0], [0.0, 1.0, 0.0, 1.0]])?;
        let targets = Matrix::from_rows(&[[0.0f32, 1.0, 1.0, 0.0]])?;
        let pass = net.forward(&inputs)?;
        let error = em(pass.output(), &targets)?;
        let output_grad = net.output_gradient(&pass, &error)?;
        Ok(Self {
            net,
            pass,
            targets,
            error,
            output_grad,
        })
    }

    /// Runs `module` once against the prepared state of `scratch`.
    fn run(&self, module: ModuleTag, scratch: &mut MlpNetwork) -> Result<()> {
        const ETA: f32 = 0.9;
        const ALPHA: f32 = 0.8;
        let w = self.net.weights();
        let act = self.net.activations();
        match module {
            ModuleTag::Ffm1 => {
                black_box(ffm(&w[0], act[0], self.pass.layer(0))?);
            }
            ModuleTag::Ffm2 => {
                black_box(ffm(&w[1], act[1], self.pass.layer(1))?);
            }
            ModuleTag::Em => {
                black_box(em(self.pass.output(), &self.targets)?);
            }
            ModuleTag::Bpm1 => {
                let g = self.net.output_gradient(&self.pass, black_box(&self.error))?;
                scratch.update_layer(2, &g, &self.pass, ETA, ALPHA)?;
            }
            ModuleTag::Bpm2 => {
                let g = self.net.hidden_gradient(1, &self.pass, black_box(&self.output_grad))?;
                scratch.update_layer(1, &g, &self.pass, ETA, ALPHA)?;
            }
        }
        Ok(())
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Times `module` in isolation for every hidden-layer size in `h1_values`.
///
/// Trials are interleaved: each round visits every size once in a freshly
/// shuffled order, so drift and periodic host noise spread evenly over the
/// sizes instead of tilting the sweep.
pub fn benchmark_sweep(module: ModuleTag, h1_values: &[usize], reps: usize) -> Result<Vec<TimingSample>> {
    if reps < MIN_REPS {
        return Err(Error::Config(format!("need at least {MIN_REPS} repetitions, got {reps}")));
    }
    let fixtures = h1_values.iter().map(|&h1| Fixture::xor(h1)).collect::<Result<Vec<_>>>()?;
    let calls = fixtures
        .iter()
        .map(|fx| calibrate(fx, module))
        .collect::<Result<Vec<_>>>()?;

    let sizes = fixtures.len();
    let warmup_start = Instant::now();
    let mut round = 0;
    while round < WARMUP_TRIALS || warmup_start.elapsed() < WARMUP_MIN {
        for (i, fx) in fixtures.iter().enumerate() {
            trial(fx, module, calls[i])?;
        }
        round += 1;
    }

    let mut per_call = vec![Vec::with_capacity(reps); sizes];
    let mut order: Vec<usize> = (0..sizes).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(ORDER_SEED);
    for round in 0..reps {
        order.shuffle(&mut rng);
        for &i in &order {
            // Rebuild the operands behind a spacer of varying size so no
            // size stays pinned to one lucky or unlucky memory layout.
            let spacer = black_box(vec![0u8; 64 * (1 + (round * 7 + i * 3) % 61)]);
            let fx = Fixture::xor(h1_values[i])?;
            per_call[i].push(trial(&fx, module, calls[i])?);
            drop(spacer);
        }
    }
    Ok(h1_values
        .iter()
        .zip(per_call.iter_mut())
        .map(|(&h1, samples)| TimingSample {
            module,
            h1,
            duration_ms: median(samples).max(f64::MIN_POSITIVE),
            trials: reps,
        })
        .collect())
}

/// Calls per trial so that every size's trial lasts about [`TARGET_TRIAL`];
/// equal trial lengths keep preemption odds equal across sizes.
fn calibrate(fx: &Fixture, module: ModuleTag) -> Result<usize> {
    let mut scratch = fx.net.clone();
    let probe_target = TARGET_TRIAL / 4;
    let mut calls = 1usize;
    loop {
        let start = Instant::now();
        for _ in 0..calls {
            fx.run(module, &mut scratch)?;
        }
        let elapsed = start.elapsed();
        if elapsed >= probe_target || calls >= 1 << 24 {
            let scale = TARGET_TRIAL.as_secs_f64() / elapsed.as_secs_f64().max(1e-9);
            return Ok(((calls as f64 * scale).round() as usize).max(1));
        }
        calls *= 2;
    }
}

/// Mean milliseconds per call over one trial.
fn trial(fx: &Fixture, module: ModuleTag, calls: usize) -> Result<f64> {
    let mut scratch = fx.net.clone();
    let start = Instant::now();
    for _ in 0..calls {
        fx.run(module, &mut scratch)?;
    }
    Ok(start.elapsed().as_secs_f64() * 1e3 / calls as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_too_few_reps() {
        assert!(matches!(benchmark_sweep(ModuleTag::Em, &[2], 4), Err(Error::Config(_))));
    }

    #[test]
    fn every_module_produces_positive_durations() {
        for module in ModuleTag::ALL {
            let s = benchmark_sweep(module, &[2, 6], MIN_REPS).unwrap();
            assert_eq!(s.len(), 2);
            assert!(s.iter().all(|x| x.duration_ms > 0.0 && x.trials == MIN_REPS && x.module == module));
        }
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }
}
