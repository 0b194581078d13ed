use std::sync::Mutex;

use mlp_core::resource::{benchmark_sweep, fit_linear, fit_module, load_paper_timing_fixture, points, ModuleTag, DEFAULT_REPS};

// Live sweeps must not share the CPU with each other.
static LIVE: Mutex<()> = Mutex::new(());

#[test]
fn repeated_sweeps_agree_within_twenty_percent() {
    let _live = LIVE.lock().unwrap_or_else(|e| e.into_inner());
    let sizes = [2, 10, 20, 38];
    for module in [ModuleTag::Ffm1, ModuleTag::Bpm2] {
        let a = benchmark_sweep(module, &sizes, DEFAULT_REPS).unwrap();
        let b = benchmark_sweep(module, &sizes, DEFAULT_REPS).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let rel = (x.duration_ms - y.duration_ms).abs() / x.duration_ms.min(y.duration_ms);
            assert!(rel < 0.2, "{module} H1={}: {} vs {} ms", x.h1, x.duration_ms, y.duration_ms);
        }
    }
}

#[test]
fn live_em_cost_does_not_depend_on_hidden_size() {
    let _live = LIVE.lock().unwrap_or_else(|e| e.into_inner());
    let s = benchmark_sweep(ModuleTag::Em, &[2, 14, 26, 38], DEFAULT_REPS).unwrap();
    assert!(fit_module(&s, ModuleTag::Em).unwrap().slope.abs() < 0.005);
}

#[test]
fn reference_table_laws_follow_the_rows() {
    let s = load_paper_timing_fixture().unwrap();
    // Every module except EM grows with the hidden layer.
    for m in [ModuleTag::Ffm1, ModuleTag::Ffm2, ModuleTag::Bpm1, ModuleTag::Bpm2] {
        let f = fit_module(&s, m).unwrap();
        assert!(f.slope > 0.0 && f.r_squared > 0.8, "{m}: {f:?}");
    }
    let em = fit_linear(&points(&s, ModuleTag::Em)).unwrap();
    assert_eq!(em.slope, 0.0);
    assert!((em.intercept - 0.06).abs() < 1e-12);
}
