//! Discrete-time dispatch at a fixed update interval.
//!
//! In the General regime the optimal response splits into a forward-time
//! mode, a constant and a reverse-time mode,
//!
//! ```text
//! Q̂(s) = K1/(s+ω) + K2/s + K3/(s-ω),   Q*(k) = K1 τ^{-k} + K2 + K3 τ^{k},
//! ```
//!
//! with `τ = exp(ω t_s)`. The reverse-time mode is carried as
//! `K3 τ^k = K3' τ^{-(N-k)}` so no sample ever raises `τ` to a positive power.
//! Samples are held as linear ramps between updates.

use serde::{Deserialize, Serialize};

use crate::error::{DispatchError, Result};
use crate::trajectory::{Form, Regime, TrajectoryParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Samples lie on the continuous optimum.
    #[default]
    Sampled,
    /// Interior samples are shifted so the held ramps deliver the scheduled
    /// energy.
    EnergyCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerCoefficients {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// `exp(ω t_s)`.
    pub tau: f64,
    /// Update interval, s.
    pub t_s: f64,
}

/// Number of update intervals in `horizon` hours at `t_s` seconds.
pub fn step_count(horizon: f64, t_s: f64) -> Result<usize> {
    let bad = DispatchError::BadStep { t_s, horizon };
    if !(t_s.is_finite() && t_s > 0.0) {
        return Err(bad);
    }
    let n = horizon * 3600.0 / t_s;
    let rounded = n.round();
    if rounded < 1.0 || (n - rounded).abs() > 1e-9 * rounded {
        return Err(bad);
    }
    Ok(rounded as usize)
}

pub fn make_coefficients(params: &TrajectoryParams, t_s: f64) -> Result<ControllerCoefficients> {
    let (k1, k2, k3) = params
        .partial_fractions()
        .ok_or(DispatchError::WrongRegime(params.regime()))?;
    step_count(params.horizon(), t_s)?;
    Ok(ControllerCoefficients {
        k1,
        k2,
        k3,
        tau: (params.omega() * t_s / 3600.0).exp(),
        t_s,
    })
}

/// Sampled dispatch sequence `Q*(0..=N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTrajectory {
    values: Vec<f64>,
    t_s: f64,
    mode: SampleMode,
}

impl DiscreteTrajectory {
    /// Builds a trajectory from raw samples at `t_s` seconds.
    pub fn from_samples(values: Vec<f64>, t_s: f64, mode: SampleMode) -> Result<Self> {
        if values.len() < 2 {
            return Err(DispatchError::EmptyTrajectory);
        }
        if !(t_s.is_finite() && t_s > 0.0) {
            return Err(DispatchError::BadStep {
                t_s,
                horizon: f64::NAN,
            });
        }
        Ok(Self { values, t_s, mode })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(k, Q*(k))` pairs.
    pub fn samples(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate()
    }

    pub fn step_seconds(&self) -> f64 {
        self.t_s
    }

    pub fn step_hours(&self) -> f64 {
        self.t_s / 3600.0
    }

    pub fn mode(&self) -> SampleMode {
        self.mode
    }

    /// Number of hold intervals.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    /// Energy of the held ramps, MWh.
    pub fn energy(&self) -> f64 {
        let ts = self.step_hours();
        self.values.windows(2).map(|w| 0.5 * ts * (w[0] + w[1])).sum()
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("at least two samples")
    }
}

pub fn sample_dispatch(
    params: &TrajectoryParams,
    t_s: f64,
    mode: SampleMode,
) -> Result<DiscreteTrajectory> {
    let horizon = params.horizon();
    let n = step_count(horizon, t_s)?;
    let ts = t_s / 3600.0;
    let time = |k: usize| if k == n { horizon } else { k as f64 * ts };

    let mut values = match (params.regime(), params.form) {
        (Regime::General, Form::Exponential { k1, k2, k3s }) => {
            let tau = (params.omega() * ts).exp();
            let mut v: Vec<f64> = (0..=n)
                .map(|k| k1 * tau.powi(-(k as i32)) + k2 + k3s * tau.powi(-((n - k) as i32)))
                .collect();
            v[0] = params.schedule().q0();
            v
        }
        _ => (0..=n)
            .map(|k| params.power_at(time(k)))
            .collect::<Result<Vec<_>>>()?,
    };

    if mode == SampleMode::EnergyCorrected {
        if n < 2 {
            return Err(DispatchError::TooFewIntervals);
        }
        // Energy each held ramp falls short of the continuous optimum.
        let mut shortfall = Vec::with_capacity(n);
        let mut prev = 0.0;
        for k in 0..n {
            let next = params.energy_at(time(k + 1))?;
            shortfall.push(next - prev - 0.5 * ts * (values[k] + values[k + 1]));
            prev = next;
        }
        // Each interval hands its shortfall to its movable end samples.
        let mut shift = vec![0.0; n + 1];
        for (k, gap) in shortfall.iter().enumerate() {
            let movable: Vec<usize> = [k, k + 1].into_iter().filter(|&j| j > 0 && j < n).collect();
            let share = gap / (ts * movable.len() as f64);
            for j in movable {
                shift[j] += share;
            }
        }
        for (v, s) in values.iter_mut().zip(&shift) {
            *v += s;
        }
    }

    Ok(DiscreteTrajectory {
        values,
        t_s,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{solve_hour, HourSchedule, PriceSet};

    fn flat() -> TrajectoryParams {
        let p = PriceSet::new(1e-3, 0.0, 1e-3, 0.0).unwrap();
        solve_hour(&p, &HourSchedule::new(100.0, 100.0, 100.0).unwrap()).unwrap()
    }

    #[test]
    fn flat_coefficients() {
        let k = make_coefficients(&flat(), 300.0).unwrap();
        assert!(k.k1.abs() < 1e-9 && k.k3.abs() < 1e-9);
        assert!((k.k2 - 100.0).abs() < 1e-9);
        assert!((k.k1 + k.k2 + k.k3 - 100.0).abs() < 1e-12);
    }

    #[test]
    fn step_must_divide_horizon() {
        assert_eq!(step_count(1.0, 300.0).unwrap(), 12);
        assert_eq!(step_count(1.0, 4.0).unwrap(), 900);
        assert!(step_count(1.0, 7.0).is_err());
        assert!(step_count(1.0, 0.0).is_err());
        assert!(step_count(1.0, 7200.0).is_err());
        assert!(matches!(
            make_coefficients(&flat(), 7.0),
            Err(DispatchError::BadStep { .. })
        ));
    }

    #[test]
    fn coefficients_need_general_regime() {
        let p = PriceSet::new(0.0, 0.0, 1.0, 0.0).unwrap();
        let traj = solve_hour(&p, &HourSchedule::new(1.0, 2.0, 1.5).unwrap()).unwrap();
        assert!(matches!(
            make_coefficients(&traj, 60.0),
            Err(DispatchError::WrongRegime(Regime::RampOnly))
        ));
    }

    #[test]
    fn flat_samples_are_constant() {
        for ts in [4.0, 300.0, 3600.0] {
            let d = sample_dispatch(&flat(), ts, SampleMode::Sampled).unwrap();
            assert!(d.values().iter().all(|q| (q - 100.0).abs() < 1e-9));
        }
    }

    #[test]
    fn ramp_only_quadratic_samples() {
        // μ/4c = 1, Q̇0 = 0, T = 2 h: Q = Q0 + t².
        let q0 = 10.0;
        let p = PriceSet::new(0.0, 0.0, 0.25, 0.0).unwrap();
        let s = HourSchedule::with_horizon(q0, q0 + 4.0, 2.0 * q0 + 8.0 / 3.0, 2.0).unwrap();
        let traj = solve_hour(&p, &s).unwrap();
        assert!((traj.mu() - 1.0).abs() < 1e-12);
        assert!(traj.qdot0().abs() < 1e-12);
        let d = sample_dispatch(&traj, 3600.0, SampleMode::Sampled).unwrap();
        let expect = [q0, q0 + 1.0, q0 + 4.0];
        for (got, want) in d.values().iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_correction_needs_two_intervals() {
        assert!(matches!(
            sample_dispatch(&flat(), 3600.0, SampleMode::EnergyCorrected),
            Err(DispatchError::TooFewIntervals)
        ));
    }

    #[test]
    fn energy_correction_keeps_end_points() {
        let p = PriceSet::new(6.34e-4, 6.34e-4, 3.09e-2, 0.0).unwrap();
        let s = HourSchedule::new(100_000.0, 110_000.0, 104_000.0).unwrap();
        let traj = solve_hour(&p, &s).unwrap();
        let d = sample_dispatch(&traj, 600.0, SampleMode::EnergyCorrected).unwrap();
        assert_eq!(d.values()[0], 100_000.0);
        assert!((d.last() - 110_000.0).abs() < 1e-8);
        assert!((d.energy() - 104_000.0).abs() < 1e-9 * 104_000.0);
    }

    #[test]
    fn energy_only_samples_step_to_level() {
        let p = PriceSet::new(1e-3, 0.0, 0.0, 0.0).unwrap();
        let s = HourSchedule::new(90.0, 120.0, 100.0).unwrap();
        let d = sample_dispatch(&solve_hour(&p, &s).unwrap(), 900.0, SampleMode::Sampled).unwrap();
        assert_eq!(d.values(), &[90.0, 100.0, 100.0, 100.0, 120.0]);
    }
}
