//! What the network costs: SRAM footprint and per-module execution time.

mod bench;
mod fit;
mod memory;
mod timing;

pub use bench::{benchmark_sweep, reference_h1_values, DEFAULT_REPS, MIN_REPS, TARGET_TRIAL, WARMUP_MIN, WARMUP_TRIALS};
pub use fit::{fit_linear, LinearFit};
pub use memory::{estimate_sram, estimate_sram_with_budget, MemoryEstimate, DEFAULT_SRAM_BUDGET};
pub use timing::{
    compare_printed_laws, fit_module, load_paper_timing_fixture, parse_reference_table, parse_timing_csv,
    points, timing_csv, LawComparison, ModuleTag, PrintedLaw, TimingSample, PRINTED_LAWS,
    TIMING_CSV_HEADER,
};

/// Cost law prediction `t(H) = slope·H + intercept`, clamped at zero.
pub fn predict_time(fit: &LinearFit, h: usize) -> f64 {
    fit.predict(h as f64)
}
