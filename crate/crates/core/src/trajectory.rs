//! Optimal continuous dispatch trajectory for one scheduling interval.
//!
//! Minimising `∫ a(Q-Qz)Q + b(Q-Qz)|Q̇| + cQ̇² dt` subject to fixed end points
//! and a scheduled energy leads to the linear ODE `c Q̈ - a Q = μ/2`. Its
//! solution family depends on which of `a` and `c` vanish, so the price set
//! is first classified into a [`Regime`]:
//!
//! * `General` (`a, c > 0`): `Q(t) = (Q0 + μ/2a) cosh ωt + (Q̇0/ω) sinh ωt - μ/2a`
//!   with `ω = √(a/c)`.
//! * `RampOnly` (`a = 0`): a parabola `μ t²/4c + Q̇0 t + Q0`.
//! * `EnergyOnly` (`c = 0`): a constant level `E_T/T` with ideal steps at the
//!   end points.
//!
//! Two numerical representations back the General regime. For `ωT ≤ 2` the
//! hyperbolic form is rewritten with the kernels in [`crate::numerics`] so
//! that it degrades smoothly into the parabola as `ω → 0`; the ramp-only
//! regime is the `ω = 0` member of the same family. Above that the solution is
//! held as `K1 e^{-ωt} + K2 + K3' e^{-ω(T-t)}`, which never evaluates an
//! exponential with a positive argument.

use serde::{Deserialize, Serialize};

use crate::error::{DispatchError, Result};
use crate::numerics::{coshm1_ratio, sinhc, sinhmx_ratio};

/// Prices at or below this value count as zero.
pub const PRICE_EPSILON: f64 = 1e-12;

/// Largest `ωT` solved in the General regime; beyond it the solution is
/// indistinguishable from the energy-only step profile.
pub const MAX_OMEGA_T: f64 = 500.0;

/// `ωT` at which the exponential representation takes over.
pub(crate) const EXPONENTIAL_FORM_MIN: f64 = 2.0;

/// Marginal prices for one hour.
///
/// * `a`: marginal price of energy, $/MW²·h
/// * `b`: marginal price of power, $/MW²
/// * `c`: marginal price of ramping, $·h/MW²
/// * `qz`: must-take generation, MW
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceSet {
    a: f64,
    b: f64,
    c: f64,
    qz: f64,
}

impl PriceSet {
    pub fn new(a: f64, b: f64, c: f64, qz: f64) -> Result<Self> {
        for (field, value) in [("a", a), ("b", b), ("c", c), ("Qz", qz)] {
            if !value.is_finite() || value < 0.0 {
                return Err(DispatchError::InvalidPrice { field, value });
            }
        }
        if a <= PRICE_EPSILON && c <= PRICE_EPSILON {
            return Err(DispatchError::DegeneratePrices { a, c });
        }
        Ok(Self { a, b, c, qz })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn qz(&self) -> f64 {
        self.qz
    }

    /// `√(a/c)` in 1/h; infinite when ramping is free.
    pub fn omega(&self) -> f64 {
        if self.c <= PRICE_EPSILON {
            f64::INFINITY
        } else {
            (self.a / self.c).sqrt()
        }
    }

    /// Same prices with the ramping price multiplied by `factor`.
    pub fn with_ramp_scale(&self, factor: f64) -> Result<Self> {
        Self::new(self.a, self.b, self.c * factor, self.qz)
    }

    /// Same prices with the energy price multiplied by `factor`.
    pub fn with_energy_scale(&self, factor: f64) -> Result<Self> {
        Self::new(self.a * factor, self.b, self.c, self.qz)
    }
}

/// Boundary and energy constraints for one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourSchedule {
    q0: f64,
    qt: f64,
    energy: f64,
    horizon: f64,
}

impl HourSchedule {
    /// A one-hour schedule: initial power `q0` (MW), terminal power `qt` (MW)
    /// and scheduled energy `energy` (MWh).
    pub fn new(q0: f64, qt: f64, energy: f64) -> Result<Self> {
        Self::with_horizon(q0, qt, energy, 1.0)
    }

    pub fn with_horizon(q0: f64, qt: f64, energy: f64, horizon: f64) -> Result<Self> {
        let check = |field, value: f64, reason| {
            if value.is_finite() && value >= 0.0 {
                Ok(())
            } else {
                Err(DispatchError::InvalidSchedule {
                    field,
                    value,
                    reason,
                })
            }
        };
        check("Q0", q0, "must be finite and non-negative")?;
        check("QT", qt, "must be finite and non-negative")?;
        check("ET", energy, "must be finite and non-negative")?;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(DispatchError::InvalidSchedule {
                field: "T",
                value: horizon,
                reason: "must be finite and positive",
            });
        }
        Ok(Self {
            q0,
            qt,
            energy,
            horizon,
        })
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn qt(&self) -> f64 {
        self.qt
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn with_energy(&self, energy: f64) -> Result<Self> {
        Self::with_horizon(self.q0, self.qt, energy, self.horizon)
    }

    pub fn with_q0(&self, q0: f64) -> Result<Self> {
        Self::with_horizon(q0, self.qt, self.energy, self.horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// Both energy and ramping carry a price.
    General,
    /// Energy is free; only ramping is priced.
    RampOnly,
    /// Ramping is free (or so cheap relative to energy that `ωT` exceeds
    /// [`MAX_OMEGA_T`]).
    EnergyOnly,
}

/// Picks the solution family for `prices` over a horizon of `horizon` hours.
pub fn classify_regime(prices: &PriceSet, horizon: f64) -> Result<Regime> {
    let a_zero = prices.a <= PRICE_EPSILON;
    let c_zero = prices.c <= PRICE_EPSILON;
    match (a_zero, c_zero) {
        (true, true) => Err(DispatchError::DegeneratePrices {
            a: prices.a,
            c: prices.c,
        }),
        (true, false) => Ok(Regime::RampOnly),
        (false, true) => Ok(Regime::EnergyOnly),
        (false, false) if prices.omega() * horizon > MAX_OMEGA_T => Ok(Regime::EnergyOnly),
        (false, false) => Ok(Regime::General),
    }
}

/// The 2×2 linear system `[A B; C D]·[μ; Q̇0] = [E_Δ; Q_Δ]` fixing the
/// multiplier and initial ramp from the energy and terminal constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSystem {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// E_Δ, MWh.
    pub energy_demand: f64,
    /// Q_Δ, MW.
    pub power_demand: f64,
}

impl ParameterSystem {
    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Solves for `(μ, Q̇0)` by Cramer's rule.
    pub fn solve(&self) -> Result<(f64, f64)> {
        let det = self.determinant();
        let scale = (self.a * self.d).abs() + (self.b * self.c).abs();
        if !det.is_finite() || det.abs() <= 1e-14 * scale {
            return Err(DispatchError::SingularSystem { det });
        }
        let mu = (self.energy_demand * self.d - self.b * self.power_demand) / det;
        let qdot0 = (self.a * self.power_demand - self.c * self.energy_demand) / det;
        Ok((mu, qdot0))
    }
}

/// Builds the parameter system for the General or RampOnly regime.
///
/// Entries are evaluated through cancellation-free kernels, e.g.
/// `A = (sinh ωT - ωT)/(2aω) = T³/(12c) · 6(sinh x - x)/x³`, so the General
/// entries pass continuously into the RampOnly ones as `a → 0`.
pub fn build_parameter_system(
    prices: &PriceSet,
    sched: &HourSchedule,
    regime: Regime,
) -> Result<ParameterSystem> {
    let t = sched.horizon;
    let x = match regime {
        Regime::General => prices.omega() * t,
        Regime::RampOnly => 0.0,
        Regime::EnergyOnly => return Err(DispatchError::WrongRegime(regime)),
    };
    let c = prices.c;
    let s = sinhc(x);
    let h = coshm1_ratio(x);
    let g = sinhmx_ratio(x);
    Ok(ParameterSystem {
        a: t * t * t * g / (12.0 * c),
        b: t * t * h / 2.0,
        c: t * t * h / (4.0 * c),
        d: t * s,
        energy_demand: sched.energy - t * s * sched.q0,
        power_demand: sched.qt - sched.q0 * x.cosh(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Form {
    /// `Q0 cosh ωt + (μ/2c)(cosh ωt - 1)/ω² + Q̇0 sinh(ωt)/ω`, valid for `ω ≥ 0`.
    Hyperbolic,
    /// `K1 e^{-ωt} + K2 + K3' e^{-ω(T-t)}`.
    Exponential { k1: f64, k2: f64, k3s: f64 },
    /// Constant level between ideal end steps.
    Level { level: f64 },
}

/// Solved optimal trajectory for one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryParams {
    regime: Regime,
    mu: f64,
    lambda: f64,
    qdot0: f64,
    omega: f64,
    schedule: HourSchedule,
    prices: PriceSet,
    pub(crate) form: Form,
}

/// Solves the optimal trajectory for one interval.
pub fn solve_hour(prices: &PriceSet, sched: &HourSchedule) -> Result<TrajectoryParams> {
    let regime = classify_regime(prices, sched.horizon)?;
    let t = sched.horizon;
    let (mu, qdot0, omega, form) = match regime {
        Regime::EnergyOnly => {
            let level = sched.energy / t;
            (-2.0 * prices.a * level, 0.0, prices.omega(), Form::Level { level })
        }
        Regime::RampOnly => {
            let (mu, qdot0) = build_parameter_system(prices, sched, regime)?.solve()?;
            (mu, qdot0, 0.0, Form::Hyperbolic)
        }
        Regime::General => {
            let omega = prices.omega();
            if omega * t <= EXPONENTIAL_FORM_MIN {
                let (mu, qdot0) = build_parameter_system(prices, sched, regime)?.solve()?;
                (mu, qdot0, omega, Form::Hyperbolic)
            } else {
                let (k1, k2, k3s) = solve_exponential(omega, sched);
                let r = (-omega * t).exp();
                let mu = -2.0 * prices.a * k2;
                let qdot0 = omega * (r * k3s - k1);
                (mu, qdot0, omega, Form::Exponential { k1, k2, k3s })
            }
        }
    };
    Ok(TrajectoryParams {
        regime,
        mu,
        lambda: mu + prices.a * prices.qz,
        qdot0,
        omega,
        schedule: *sched,
        prices: *prices,
        form,
    })
}

/// Coefficients of `K1 e^{-ωt} + K2 + K3' e^{-ω(T-t)}` meeting
/// `Q(0) = Q0`, `Q(T) = QT` and `∫Q = E_T`.
fn solve_exponential(omega: f64, sched: &HourSchedule) -> (f64, f64, f64) {
    let t = sched.horizon;
    let x = omega * t;
    let r = (-x).exp();
    let one_minus_r = -(-x).exp_m1();
    let phi = one_minus_r / omega;
    let ends = sched.q0 + sched.qt;
    // Symmetric part S = K1 + K3' and K2 from the 2x2 block; positive for x > 0.
    let det = (1.0 + r) * t - 2.0 * phi;
    let sym = (t * ends - 2.0 * sched.energy) / det;
    let k2 = ((1.0 + r) * sched.energy - phi * ends) / det;
    let anti = (sched.q0 - sched.qt) / one_minus_r;
    (0.5 * (sym + anti), k2, 0.5 * (sym - anti))
}

impl TrajectoryParams {
    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Lagrange multiplier μ including must-take generation, $/MWh.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Lagrange multiplier λ = μ + a·Qz, $/MWh.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Initial ramp Q̇0, MW/h.
    pub fn qdot0(&self) -> f64 {
        self.qdot0
    }

    /// ω in 1/h (0 for RampOnly).
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn schedule(&self) -> &HourSchedule {
        &self.schedule
    }

    pub fn prices(&self) -> &PriceSet {
        &self.prices
    }

    pub fn horizon(&self) -> f64 {
        self.schedule.horizon
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let horizon = self.schedule.horizon;
        if t.is_nan() || t < 0.0 || t > horizon * (1.0 + 1e-12) {
            return Err(DispatchError::OutOfDomain { t, horizon });
        }
        Ok(t.min(horizon))
    }

    /// Coefficient of `sinh(ωt)/ω` in the ramp (hyperbolic form).
    fn curvature_weight(&self) -> f64 {
        self.schedule.q0 * self.omega * self.omega + self.mu / (2.0 * self.prices.c)
    }

    /// Dispatch power `Q(t)` in MW.
    pub fn power_at(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        let q0 = self.schedule.q0;
        Ok(match self.form {
            Form::Hyperbolic => {
                let w = self.omega * t;
                let half = sinhc(0.5 * w);
                q0 * w.cosh()
                    + self.mu / (4.0 * self.prices.c) * t * t * half * half
                    + self.qdot0 * t * sinhc(w)
            }
            Form::Exponential { k1, k3s, .. } => {
                let horizon = self.schedule.horizon;
                let r = (-self.omega * horizon).exp();
                let tail = (-self.omega * (horizon - t)).exp();
                q0 + k1 * (-self.omega * t).exp_m1() + k3s * (tail - r)
            }
            Form::Level { level } => {
                if t == 0.0 {
                    q0
                } else if t == self.schedule.horizon {
                    self.schedule.qt
                } else {
                    level
                }
            }
        })
    }

    /// Ramp `Q̇(t)` in MW/h. The energy-only steps are ideal and excluded.
    pub fn ramp_at(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        Ok(match self.form {
            Form::Hyperbolic => {
                let w = self.omega * t;
                self.curvature_weight() * t * sinhc(w) + self.qdot0 * w.cosh()
            }
            Form::Exponential { k1, k3s, .. } => {
                let horizon = self.schedule.horizon;
                let head = (-self.omega * t).exp();
                let tail = (-self.omega * (horizon - t)).exp();
                self.omega * (k3s * tail - k1 * head)
            }
            Form::Level { .. } => 0.0,
        })
    }

    /// Curvature `Q̈(t)` in MW/h².
    pub fn accel_at(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        Ok(match self.form {
            Form::Hyperbolic => {
                let w = self.omega * t;
                self.curvature_weight() * w.cosh()
                    + self.qdot0 * self.omega * self.omega * t * sinhc(w)
            }
            Form::Exponential { k1, k3s, .. } => {
                let horizon = self.schedule.horizon;
                let head = (-self.omega * t).exp();
                let tail = (-self.omega * (horizon - t)).exp();
                self.omega * self.omega * (k1 * head + k3s * tail)
            }
            Form::Level { .. } => 0.0,
        })
    }

    /// Energy delivered over `[0, t]` in MWh.
    pub fn energy_at(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        let q0 = self.schedule.q0;
        Ok(match self.form {
            Form::Hyperbolic => {
                let w = self.omega * t;
                q0 * t * sinhc(w)
                    + self.mu * t * t * t / (12.0 * self.prices.c) * sinhmx_ratio(w)
                    + self.qdot0 * t * t / 2.0 * coshm1_ratio(w)
            }
            Form::Exponential { k1, k3s, .. } => {
                let horizon = self.schedule.horizon;
                let w = self.omega;
                let r = (-w * horizon).exp();
                let tail = (-w * (horizon - t)).exp();
                q0 * t + k1 * (-(-w * t).exp_m1() / w - t) + k3s * ((tail - r) / w - r * t)
            }
            Form::Level { level } => level * t,
        })
    }

    /// Partial-fraction coefficients `(K1, K2, K3)` of
    /// `K1/(s+ω) + K2/s + K3/(s-ω)`; `None` outside the General regime.
    pub fn partial_fractions(&self) -> Option<(f64, f64, f64)> {
        if self.regime != Regime::General {
            return None;
        }
        Some(match self.form {
            Form::Exponential { k1, k2, k3s } => {
                (k1, k2, k3s * (-self.omega * self.schedule.horizon).exp())
            }
            _ => {
                let k2 = -self.mu / (2.0 * self.prices.a);
                let mid = 0.5 * (self.schedule.q0 - k2);
                let skew = self.qdot0 / (2.0 * self.omega);
                (mid - skew, k2, mid + skew)
            }
        })
    }

    /// Interior time `t_c ∈ (0, T)` where the ramp changes sign, if any.
    pub fn ramp_sign_change(&self) -> Option<f64> {
        let horizon = self.schedule.horizon;
        let tc = match self.form {
            Form::Level { .. } => return None,
            Form::Hyperbolic => {
                let weight = self.curvature_weight();
                if weight == 0.0 {
                    return None;
                }
                // tanh(ωt)/ω = -Q̇0 / weight
                let target = -self.qdot0 / weight;
                if self.omega == 0.0 {
                    target
                } else {
                    let arg = self.omega * target;
                    if arg.abs() >= 1.0 {
                        return None;
                    }
                    arg.atanh() / self.omega
                }
            }
            Form::Exponential { k1, k3s, .. } => {
                let ratio = k1 / k3s;
                if !(ratio > 0.0 && ratio.is_finite()) {
                    return None;
                }
                (ratio.ln() + self.omega * horizon) / (2.0 * self.omega)
            }
        };
        (tc > 0.0 && tc < horizon).then_some(tc)
    }
}
