//! Closed-form dispatch costs.
//!
//! The running cost is `a(Q-Qz)Q + b(Q-Qz)|Q̇| + cQ̇²`. Its energy and ramping
//! parts are integrated exactly along each solution family. The power part
//! telescopes on every monotone piece to `|b ΔQ|·(mean(Q) - Qz)`, so it only
//! needs the trajectory at the ramp sign change.

use crate::controller::DiscreteTrajectory;
use crate::error::{DispatchError, Result};
use crate::numerics::{coshm1_ratio, quartic_ratio, sinhc, sinhmx_ratio};
use crate::trajectory::{Form, HourSchedule, PriceSet, TrajectoryParams};
use crate::basecase::build_base_profile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// `∫ a(Q-Qz)Q dt`, $.
    pub energy_cost: f64,
    /// `∫ b(Q-Qz)|Q̇| dt`, $.
    pub power_cost: f64,
    /// `∫ cQ̇² dt`, $.
    pub ramping_cost: f64,
    pub total: f64,
    /// Interior time where the ramp changes sign and the power term was split.
    pub sign_split_at: Option<f64>,
}

impl CostBreakdown {
    fn new(energy_cost: f64, power_cost: f64, ramping_cost: f64, sign_split_at: Option<f64>) -> Self {
        Self {
            energy_cost,
            power_cost,
            ramping_cost,
            total: energy_cost + power_cost + ramping_cost,
            sign_split_at,
        }
    }
}

/// Power cost of a monotone move from `from` to `to`.
fn monotone_power_cost(b: f64, qz: f64, from: f64, to: f64) -> f64 {
    0.5 * (b * (to - from)).abs() * (to + from - 2.0 * qz)
}

/// `(∫Q², ∫Q̇²)` over the whole horizon.
fn square_integrals(params: &TrajectoryParams) -> (f64, f64) {
    let t = params.horizon();
    let q0 = params.schedule().q0();
    let omega = params.omega();
    match params.form {
        Form::Level { level } => (level * level * t, 0.0),
        Form::Hyperbolic => {
            // Q = q0 f1 + m f2 + v f3, Q̇ = v f1 + w f3 with
            // f1 = cosh ωt, f2 = (cosh ωt - 1)/ω², f3 = sinh(ωt)/ω.
            let x = omega * t;
            let m = params.mu() / (2.0 * params.prices().c());
            let v = params.qdot0();
            let w = q0 * omega * omega + m;
            let (t2, t3) = (t * t, t * t * t);
            let i11 = 0.5 * t * (1.0 + sinhc(2.0 * x));
            let i13 = 0.5 * t2 * sinhc(x).powi(2);
            let i33 = t3 * sinhmx_ratio(2.0 * x) / 3.0;
            let i12 = t3 * (2.0 * sinhmx_ratio(2.0 * x) - sinhmx_ratio(x)) / 6.0;
            let i22 = t3 * t2 * quartic_ratio(x) / 20.0;
            let i23 = t2 * t2 * coshm1_ratio(x).powi(2) / 8.0;
            let q_sq = q0 * q0 * i11
                + m * m * i22
                + v * v * i33
                + 2.0 * (q0 * m * i12 + q0 * v * i13 + m * v * i23);
            let ramp_sq = v * v * i11 + w * w * i33 + 2.0 * v * w * i13;
            (q_sq, ramp_sq)
        }
        Form::Exponential { k1, k2, k3s } => {
            let x = omega * t;
            let r = (-x).exp();
            let phi = -(-x).exp_m1() / omega;
            let decay = -(-2.0 * x).exp_m1() / (2.0 * omega);
            let edges = k1 * k1 + k3s * k3s;
            let cross = k1 * k3s * r * t;
            let q_sq = edges * decay + k2 * k2 * t + 2.0 * k2 * (k1 + k3s) * phi + 2.0 * cross;
            let ramp_sq = omega * omega * (edges * decay - 2.0 * cross);
            (q_sq, ramp_sq)
        }
    }
}

/// Cost of the optimal continuous trajectory.
pub fn optimal_cost(params: &TrajectoryParams) -> CostBreakdown {
    let prices = params.prices();
    let sched = params.schedule();
    let (a, b, c, qz) = (prices.a(), prices.b(), prices.c(), prices.qz());
    if let Form::Level { .. } = params.form {
        let e = sched.energy();
        return CostBreakdown::new(a * e * (e / sched.horizon() - qz), 0.0, 0.0, None);
    }
    let (q_sq, ramp_sq) = square_integrals(params);
    let delivered = params
        .energy_at(params.horizon())
        .expect("horizon is in domain");
    let energy_cost = a * (q_sq - qz * delivered);
    let ramping_cost = c * ramp_sq;

    let split = params.ramp_sign_change();
    let power_cost = match split {
        Some(tc) => {
            let peak = params.power_at(tc).expect("t_c is interior");
            monotone_power_cost(b, qz, sched.q0(), peak) + monotone_power_cost(b, qz, peak, sched.qt())
        }
        None => monotone_power_cost(b, qz, sched.q0(), sched.qt()),
    };
    CostBreakdown::new(energy_cost, power_cost, ramping_cost, split)
}

/// Cost of the conventional profile from [`crate::basecase`].
pub fn base_case_cost(prices: &PriceSet, sched: &HourSchedule) -> CostBreakdown {
    let profile = build_base_profile(sched);
    let (a, b, c, qz) = (prices.a(), prices.b(), prices.c(), prices.qz());
    let (q0, qe, qt) = (sched.q0(), profile.qe, sched.qt());
    let t = sched.horizon();
    let energy_cost = a * t / 18.0 * (qt * qt + qt * qe + 14.0 * qe * qe + qe * q0 + q0 * q0)
        - a * t / 12.0 * (qt + 10.0 * qe + q0) * qz;
    let power_cost = (0.5 * b * (qe - q0)).abs() * (qe + q0 - 2.0 * qz)
        + (0.5 * b * (qt - qe)).abs() * (qt + qe - 2.0 * qz);
    let ramping_cost =
        6.0 * c / t * (qt * qt - 2.0 * qt * qe + 2.0 * qe * qe - 2.0 * q0 * qe + q0 * q0);
    CostBreakdown::new(energy_cost, power_cost, ramping_cost, None)
}

/// Cost of a sampled dispatch held as linear ramps between samples.
///
/// Each interval `[k, k+1]` contributes
/// `a·t_s/4·[(Q*_k + Q*_{k+1})² - 2Qz(Q*_k + Q*_{k+1})]
///  + ½|b(Q*_{k+1} - Q*_k)|(Q*_{k+1} + Q*_k - 2Qz) + c/t_s·(Q*_{k+1} - Q*_k)²`,
/// summed over the `N` intervals of the horizon.
pub fn discrete_cost_breakdown(traj: &DiscreteTrajectory, prices: &PriceSet) -> Result<CostBreakdown> {
    let samples = traj.values();
    if samples.len() < 2 {
        return Err(DispatchError::EmptyTrajectory);
    }
    let (a, b, c, qz) = (prices.a(), prices.b(), prices.c(), prices.qz());
    let ts = traj.step_hours();
    let (mut energy, mut power, mut ramping) = (0.0, 0.0, 0.0);
    for w in samples.windows(2) {
        let (now, next) = (w[0], w[1]);
        let sum = now + next;
        let diff = next - now;
        energy += a * ts / 4.0 * (sum * sum - 2.0 * qz * sum);
        power += 0.5 * (b * diff).abs() * (sum - 2.0 * qz);
        ramping += c / ts * diff * diff;
    }
    Ok(CostBreakdown::new(energy, power, ramping, None))
}

pub fn discrete_cost(traj: &DiscreteTrajectory, prices: &PriceSet) -> Result<f64> {
    discrete_cost_breakdown(traj, prices).map(|c| c.total)
}

/// Coefficients of the second variation `∫ α v² + 2β v v' + γ v'² dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondVariation {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SecondVariation {
    pub fn of(prices: &PriceSet) -> Self {
        Self {
            alpha: 2.0 * prices.a(),
            beta: prices.b(),
            gamma: 2.0 * prices.c(),
        }
    }

    /// Strict positivity of the energy and ramping curvature. `β` only enters
    /// through `2β v v'`, which integrates to zero when `v(0) = v(T) = 0`.
    pub fn is_minimizer(&self) -> bool {
        self.alpha > 0.0 && self.gamma > 0.0
    }
}

pub fn is_minimizer(prices: &PriceSet) -> bool {
    SecondVariation::of(prices).is_minimizer()
}
