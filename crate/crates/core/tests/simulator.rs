mod common;

use common::*;
use ramp_dispatch::simulator::{error_stream, hour_rng};
use ramp_dispatch::{
    duration_curve, run_scenario, run_scenario_with, sensitivity_sweep, synthetic_year, totals, ErrorModel, Execution,
    HourRecord, RenewableLevel, SampleMode, ScenarioConfig,
};

fn study_record() -> HourRecord {
    HourRecord {
        hour: 0,
        a: STUDY_A,
        b: STUDY_A,
        c: STUDY_C,
        qz: 0.0,
        q0: 100_000.0,
        qt: 110_000.0,
        et: 105_000.0,
    }
}

#[test]
fn full_year_is_reproducible() {
    let cfg = ScenarioConfig::new(synthetic_year(8760, 42, RenewableLevel::High));
    let first = run_scenario(&cfg).unwrap();
    let second = run_scenario(&cfg).unwrap();
    assert_eq!(first, second);
    assert_eq!(first, run_scenario_with(&cfg, Execution::Serial).unwrap());
}

#[test]
fn chained_year_is_reproducible_and_chains() {
    let mut cfg = ScenarioConfig::new(synthetic_year(500, 8, RenewableLevel::Low));
    cfg.chaining = true;
    cfg.mode = SampleMode::EnergyCorrected;
    let a = run_scenario_with(&cfg, Execution::Parallel).unwrap();
    let b = run_scenario_with(&cfg, Execution::Serial).unwrap();
    assert_eq!(a, b);
}

#[test]
fn study_hour_saves_without_error() {
    let mut cfg = ScenarioConfig::new(vec![study_record()]);
    cfg.error.std = 0.0;
    let r = run_scenario(&cfg).unwrap();
    assert!(r[0].savings > 0.0);
    assert!(r[0].c_opt <= r[0].c_base);
}

#[test]
fn duration_curve_preserves_the_total() {
    let cfg = ScenarioConfig::new(synthetic_year(100, 17, RenewableLevel::High));
    let res = run_scenario(&cfg).unwrap();
    let savings: Vec<f64> = res.iter().map(|r| r.savings).collect();
    let curve = duration_curve(&savings).unwrap();
    assert_eq!(curve.values.len(), 100);
    assert!(curve.values.windows(2).all(|w| w[0] >= w[1]));
    let total = totals(&res).savings;
    let sum: f64 = curve.values.iter().sum();
    assert!((sum - total).abs() <= 1e-9 * totals(&res).c_base);
}

#[test]
fn accounting_identity() {
    let cfg = ScenarioConfig::new(synthetic_year(300, 3, RenewableLevel::Low));
    let res = run_scenario(&cfg).unwrap();
    for r in &res {
        assert_eq!(r.savings, r.c_base - r.c_star);
    }
    let t = totals(&res);
    let base: f64 = res.iter().map(|r| r.c_base).sum();
    let star: f64 = res.iter().map(|r| r.c_star).sum();
    assert!((t.savings - (base - star)).abs() <= 1e-12 * base);
}

#[test]
fn cheaper_energy_raises_the_savings_fraction() {
    let cfg = ScenarioConfig::new(synthetic_year(240, 5, RenewableLevel::High));
    let fraction = |cfg: &ScenarioConfig| {
        let t = totals(&run_scenario(cfg).unwrap());
        t.savings / t.c_base
    };
    assert!(fraction(&cfg.with_energy_scale(0.01)) > fraction(&cfg));
}

#[test]
fn savings_grow_with_ramping_price() {
    let cfg = ScenarioConfig::new(synthetic_year(500, 12, RenewableLevel::High));
    let rows = sensitivity_sweep(&cfg, &[0.25, 0.5, 1.0, 1.5, 2.0]).unwrap();
    assert!(rows.windows(2).all(|w| w[0].total_savings < w[1].total_savings));
}

/// With no power price the optimum is a minimum over costs linear in the
/// ramping price, while the base cost is linear in it. With fixed schedules
/// the savings are therefore convex in the scale factor, so a cut in the
/// ramping price cannot lose more savings than the same rise gains.
#[test]
fn continuous_savings_are_convex_in_ramping_price() {
    let hours = synthetic_year(500, 21, RenewableLevel::High)
        .into_iter()
        .map(|h| HourRecord { b: 0.0, ..h })
        .collect();
    let mut cfg = ScenarioConfig::new(hours);
    cfg.error.std = 0.0;
    cfg.mode = SampleMode::EnergyCorrected;
    let savings = |f: f64| -> Vec<f64> {
        run_scenario(&cfg.with_ramp_scale(f)).unwrap().iter().map(|r| r.c_base - r.c_opt).collect()
    };
    let (lo, mid, hi) = (savings(0.5), savings(1.0), savings(1.5));
    for i in 0..lo.len() {
        let scale = mid[i].abs().max(1.0);
        assert!(lo[i] + hi[i] - 2.0 * mid[i] >= -1e-9 * scale, "hour {i}");
    }
}

#[test]
fn error_draws_match_the_model() {
    let draws = error_stream(&ErrorModel { mean: 25.0, std: 50.0 }, 99, 20_000).unwrap();
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((mean - 25.0).abs() < 1.5);
    assert!((var.sqrt() - 50.0).abs() < 1.5);
    let zero = error_stream(&ErrorModel { mean: 0.0, std: 0.0 }, 1, 10).unwrap();
    assert!(zero.iter().all(|&x| x == 0.0));
    // Streams for different hours are distinct generators.
    use rand::RngCore;
    assert_ne!(hour_rng(1, 0).next_u64(), hour_rng(1, 1).next_u64());
}

#[test]
fn carried_error_closes_the_energy_books() {
    let mut cfg = ScenarioConfig::new(synthetic_year(48, 4, RenewableLevel::Low));
    cfg.mode = SampleMode::EnergyCorrected;
    let res = run_scenario(&cfg).unwrap();
    let scheduled: f64 = cfg.hours.iter().map(|h| h.et).sum();
    let delivered: f64 = res.iter().map(|r| r.energy_delivered).sum();
    let last = res.last().unwrap().carried_error;
    assert!((scheduled - delivered - last).abs() <= 1e-9 * scheduled);
}
