#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramp_dispatch::{BaseProfile, HourSchedule, PriceSet, TrajectoryParams};

pub const BASE_A: f64 = 1.27e-3;
pub const BASE_C: f64 = 4.23e-6;
pub const STUDY_A: f64 = 6.34e-4;
pub const STUDY_C: f64 = 3.09e-2;

pub fn base_prices() -> PriceSet {
    PriceSet::new(BASE_A, BASE_A, BASE_C, 0.0).unwrap()
}

pub fn study_prices() -> PriceSet {
    PriceSet::new(STUDY_A, STUDY_A, STUDY_C, 0.0).unwrap()
}

/// 100 GW to 110 GW with 105 GWh.
pub fn study_hour() -> HourSchedule {
    HourSchedule::new(100_000.0, 110_000.0, 105_000.0).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Random hour: a in [1e-4, 1e-2], c in [1e-6, 1e-1] (log-uniform),
/// Q0 and QT in [50, 150] GW, energy within 10% of the trapezoid.
pub fn random_hour(rng: &mut ChaCha8Rng) -> (f64, f64, HourSchedule) {
    let a = log_uniform(rng, 1e-4, 1e-2);
    let c = log_uniform(rng, 1e-6, 1e-1);
    let q0 = rng.random_range(50_000.0..150_000.0);
    let qt = rng.random_range(50_000.0..150_000.0);
    let mid = 0.5 * (q0 + qt);
    let e = mid * rng.random_range(0.9..1.1);
    (a, c, HourSchedule::new(q0, qt, e).unwrap())
}

/// Integral of `f` over `[lo, hi]` by double-exponential quadrature on
/// `pieces` equal sub-intervals.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, pieces: usize, tol: f64) -> f64 {
    let w = (hi - lo) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let a = lo + i as f64 * w;
            let b = if i + 1 == pieces { hi } else { a + w };
            quadrature::double_exponential::integrate(&f, a, b, tol / pieces as f64).integral
        })
        .sum()
}

/// Raw running cost `a(Q-Qz)Q + b|Q̇|(Q-Qz) + cQ̇²`.
pub fn running_cost(p: &PriceSet, q: f64, qdot: f64) -> f64 {
    p.a() * (q - p.qz()) * q + p.b() * qdot.abs() * (q - p.qz()) + p.c() * qdot * qdot
}

/// Zeros of `g` on `(lo, hi)` found by scanning and bisection.
pub fn sign_changes(g: impl Fn(f64) -> f64, lo: f64, hi: f64, scan: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let dt = (hi - lo) / scan as f64;
    let mut prev_t = lo;
    let mut prev = g(lo);
    for i in 1..=scan {
        let t = lo + i as f64 * dt;
        let cur = g(t);
        if prev * cur < 0.0 {
            let (mut l, mut r) = (prev_t, t);
            for _ in 0..200 {
                let m = 0.5 * (l + r);
                if g(m) * prev > 0.0 {
                    l = m;
                } else {
                    r = m;
                }
            }
            roots.push(0.5 * (l + r));
        }
        prev_t = t;
        prev = cur;
    }
    roots
}

/// Quadrature of the running cost along an arbitrary smooth-by-parts
/// trajectory, splitting at `breaks`.
pub fn path_cost(p: &PriceSet, q: impl Fn(f64) -> f64, qdot: impl Fn(f64) -> f64, breaks: &[f64], horizon: f64, scale: f64) -> f64 {
    let mut knots = vec![0.0];
    knots.extend(breaks.iter().copied().filter(|&t| t > 0.0 && t < horizon));
    knots.push(horizon);
    knots.sort_by(f64::total_cmp);
    knots
        .windows(2)
        .map(|w| integrate(|t| running_cost(p, q(t), qdot(t)), w[0], w[1], 16, 1e-14 * scale))
        .sum()
}

/// Quadrature of the running cost along the analytic optimum.
pub fn optimal_cost_quad(traj: &TrajectoryParams) -> f64 {
    let horizon = traj.horizon();
    let q = |t: f64| traj.power_at(t).unwrap();
    let qd = |t: f64| traj.ramp_at(t).unwrap();
    let breaks = sign_changes(qd, 0.0, horizon, 4000);
    let p = traj.prices();
    let scale = p.a() * horizon * q(0.0).abs().max(q(horizon).abs()).powi(2);
    path_cost(p, q, qd, &breaks, horizon, scale.max(1.0))
}

/// Quadrature of the running cost along the conventional profile.
pub fn base_cost_quad(p: &PriceSet, profile: &BaseProfile) -> f64 {
    let pts = profile.breakpoints();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let ((t0, q0), (t1, q1)) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let slope = (q1 - q0) / (t1 - t0);
        let q = |t: f64| q0 + slope * (t - t0);
        let scale = (p.a() * (t1 - t0) * q0.abs().max(q1.abs()).powi(2)).max(1.0);
        total += integrate(|t| running_cost(p, q(t), slope), t0, t1, 4, 1e-14 * scale);
    }
    total
}

pub fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(1.0)
}

/// Writes a status line straight to stderr so it shows up even when the
/// harness captures test output.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    use std::io::Write;
    let status = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {id:>2} [{status}] {name}: {detail}");
}
