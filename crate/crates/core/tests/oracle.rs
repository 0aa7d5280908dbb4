mod common;

use common::*;
use ramp_dispatch::oracle::{compare, solve_numeric};
use ramp_dispatch::{optimal_cost, solve_hour, Execution, HourSchedule, PriceSet, Regime};

#[test]
fn flat_schedule_both_paths_agree() {
    let p = PriceSet::new(1e-3, 1e-3, 1e-2, 0.0).unwrap();
    let s = HourSchedule::new(100.0, 100.0, 100.0).unwrap();
    let sol = solve_numeric(&p, &s, 3600).unwrap();
    let analytic = optimal_cost(&solve_hour(&p, &s).unwrap());
    assert!(compare(analytic.total, &sol) <= 1e-12);
    assert!((sol.cost - 1e-3 * 100.0 * 100.0).abs() < 1e-9);
}

#[test]
fn ramp_only_grid_matches_parabola() {
    let p = PriceSet::new(0.0, 0.0, 2e-2, 0.0).unwrap();
    let s = HourSchedule::new(100_000.0, 110_000.0, 103_000.0).unwrap();
    let traj = solve_hour(&p, &s).unwrap();
    assert_eq!(traj.regime(), Regime::RampOnly);
    let sol = solve_numeric(&p, &s, 3600).unwrap();
    for (k, q) in sol.grid.iter().enumerate() {
        let exact = traj.power_at(k as f64 / 3600.0).unwrap();
        assert!(rel(*q, exact) <= 1e-6, "k={k}");
    }
}

#[test]
fn study_case_midpoint_and_cost() {
    let p = study_prices();
    let s = study_hour();
    let traj = solve_hour(&p, &s).unwrap();
    let sol = solve_numeric(&p, &s, 3600).unwrap();
    assert!(rel(traj.power_at(0.5).unwrap(), sol.grid[1800]) <= 1e-6);
    assert!(compare(optimal_cost(&traj).total, &sol) <= 1e-3);
    assert!(sol.energy_gap.abs() <= 1e-8 * s.energy());
    assert_eq!(sol.endpoint_gaps, (0.0, 0.0));
}

#[test]
fn oracle_sits_above_the_continuous_optimum_and_refines() {
    let mut r = rng(606);
    let cases: Vec<_> = (0..100)
        .map(|_| {
            let (a, c, s) = random_hour(&mut r);
            (PriceSet::new(a, 0.0, c, 0.0).unwrap(), s)
        })
        .collect();
    let rows = Execution::Parallel.map(&cases, |(p, s)| {
        let traj = solve_hour(p, s).unwrap();
        let analytic = optimal_cost(&traj).total;
        let coarse = solve_numeric(p, s, 450).unwrap();
        let fine = solve_numeric(p, s, 3600).unwrap();
        // Trapezoid error bound with curvature scale ω².
        let bound = (1.0 + traj.omega().powi(2)) / (3600.0f64 * 3600.0) * analytic;
        let above = fine.cost >= analytic - bound;
        (above, compare(analytic, &fine) < compare(analytic, &coarse))
    });
    assert!(rows.iter().all(|r| r.0));
    let shrinking = rows.iter().filter(|r| r.1).count();
    assert!(shrinking >= 95, "{shrinking} of 100 refined");
}

#[test]
fn monotone_instances_with_power_price_converge() {
    let mut r = rng(707);
    let mut checked = 0;
    while checked < 30 {
        let (a, c, s) = random_hour(&mut r);
        let p = PriceSet::new(a, a, c, 0.0).unwrap();
        let traj = solve_hour(&p, &s).unwrap();
        if traj.ramp_sign_change().is_some() {
            continue;
        }
        let sol = solve_numeric(&p, &s, 3600).unwrap();
        assert!(sol.iterations <= 3);
        assert!(compare(optimal_cost(&traj).total, &sol) <= 1e-3);
        checked += 1;
    }
}
