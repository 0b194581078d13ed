//! Ordinary least squares for time-vs-neurons cost laws.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    /// Milliseconds per hidden neuron.
    pub slope: f64,
    /// Milliseconds.
    pub intercept: f64,
    pub r_squared: f64,
    /// Residual standard error, `sqrt(SSE / (n - 2))`.
    pub residual_std: f64,
    pub points: usize,
}

impl LinearFit {
    /// `slope·h + intercept`, never negative.
    pub fn predict(&self, h: f64) -> f64 {
        (self.slope * h + self.intercept).max(0.0)
    }
}

/// Fits `y = slope·x + intercept` over `(x, y)` points.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<LinearFit> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {n}")));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 distinct x values, got {}",
            xs.len()
        )));
    }

    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    // Constant data is explained perfectly by a flat line.
    let r_squared = if syy <= f64::EPSILON * nf * mean_y * mean_y {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        residual_std: (sse / (nf - 2.0)).sqrt(),
        points: n,
    })
}
