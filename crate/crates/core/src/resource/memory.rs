//! Working-memory (SRAM) footprint of the matrices a training iteration keeps live.
//!
//! Only the shape-rule matrices are counted; stack, scalars and code are not,
//! so the total is a lower bound on what a target would need.

use crate::error::{Error, Result};

/// ATmega2560-class working memory.
pub const DEFAULT_SRAM_BUDGET: usize = 8192;

const BYTES_PER_ELEMENT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryEstimate {
    /// `W^k` per layer.
    pub weights: Vec<usize>,
    /// `ΔW^k(n-1)` per layer.
    pub momentum: Vec<usize>,
    /// `Y^0..Y^L`; every layer that feeds another carries its `-1` bias row.
    pub activations: Vec<usize>,
    /// `D`.
    pub targets: usize,
    /// `E`.
    pub error: usize,
    /// `g^k` per layer.
    pub gradients: Vec<usize>,
    pub total: usize,
    pub budget: usize,
    pub fits: bool,
}

impl MemoryEstimate {
    /// `(label, bytes)` for every buffer, in a stable order.
    pub fn breakdown(&self) -> Vec<(String, usize)> {
        let mut items = Vec::new();
        for (k, &b) in self.weights.iter().enumerate() {
            items.push((format!("W{}", k + 1), b));
        }
        for (k, &b) in self.momentum.iter().enumerate() {
            items.push((format!("dW{}", k + 1), b));
        }
        for (k, &b) in self.activations.iter().enumerate() {
            items.push((format!("Y{k}"), b));
        }
        items.push(("D".into(), self.targets));
        items.push(("E".into(), self.error));
        for (k, &b) in self.gradients.iter().enumerate() {
            items.push((format!("g{}", k + 1), b));
        }
        items
    }

    pub fn weight_bytes(&self) -> usize {
        self.weights.iter().sum::<usize>() + self.momentum.iter().sum::<usize>()
    }
}

pub fn estimate_sram(widths: &[usize], batch: usize) -> Result<MemoryEstimate> {
    estimate_sram_with_budget(widths, batch, DEFAULT_SRAM_BUDGET)
}

pub fn estimate_sram_with_budget(widths: &[usize], batch: usize, budget: usize) -> Result<MemoryEstimate> {
    if widths.len() < 2 || widths.contains(&0) || batch == 0 {
        return Err(Error::Config(format!(
            "invalid architecture {widths:?} with batch {batch}"
        )));
    }
    let bytes = |elements: usize| elements * BYTES_PER_ELEMENT;
    let depth = widths.len() - 1;
    let outputs = widths[depth];

    let weights: Vec<usize> = widths.windows(2).map(|p| bytes(p[1] * (p[0] + 1))).collect();
    let momentum = weights.clone();
    let activations: Vec<usize> = widths
        .iter()
        .enumerate()
        .map(|(k, &h)| bytes(if k < depth { h + 1 } else { h } * batch))
        .collect();
    let targets = bytes(outputs * batch);
    let error = targets;
    let gradients: Vec<usize> = widths[1..].iter().map(|&h| bytes(h * batch)).collect();

    let total = weights.iter().sum::<usize>()
        + momentum.iter().sum::<usize>()
        + activations.iter().sum::<usize>()
        + targets
        + error
        + gradients.iter().sum::<usize>();
    Ok(MemoryEstimate {
        weights,
        momentum,
        activations,
        targets,
        error,
        gradients,
        total,
        budget,
        fits: total <= budget,
    })
}
