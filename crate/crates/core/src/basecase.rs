//! Conventional hourly dispatch: ramp to the scheduled level over the first
//! sixth of the interval, hold, and ramp to the terminal level over the last
//! sixth (the 20 minutes around each hour boundary, re-anchored inside the
//! hour).

use crate::error::{DispatchError, Result};
use crate::trajectory::HourSchedule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseProfile {
    /// Scheduled load Q_E, MW.
    pub qe: f64,
    /// Ramp over the opening segment, MW/h.
    pub qdot0: f64,
    /// Ramp over the closing segment, MW/h.
    pub qdot_t: f64,
    q0: f64,
    qt: f64,
    horizon: f64,
}

pub fn build_base_profile(sched: &HourSchedule) -> BaseProfile {
    let t = sched.horizon();
    let (q0, qt) = (sched.q0(), sched.qt());
    // Trapezoid energy is T[(Q0+QT)/12 + 5 QE/6].
    let qe = 1.2 * (sched.energy() / t - (q0 + qt) / 12.0);
    BaseProfile {
        qe,
        qdot0: 6.0 * (qe - q0) / t,
        qdot_t: 6.0 * (qt - qe) / t,
        q0,
        qt,
        horizon: t,
    }
}

impl BaseProfile {
    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn qt(&self) -> f64 {
        self.qt
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `(t, Q)` corners of the piecewise-linear profile.
    pub fn breakpoints(&self) -> [(f64, f64); 4] {
        let t = self.horizon;
        [
            (0.0, self.q0),
            (t / 6.0, self.qe),
            (5.0 * t / 6.0, self.qe),
            (t, self.qt),
        ]
    }

    pub fn power_at(&self, t: f64) -> Result<f64> {
        let horizon = self.horizon;
        if t.is_nan() || t < 0.0 || t > horizon * (1.0 + 1e-12) {
            return Err(DispatchError::OutOfDomain { t, horizon });
        }
        let t = t.min(horizon);
        let bp = self.breakpoints();
        let seg = bp
            .windows(2)
            .find(|w| t <= w[1].0)
            .unwrap_or(&bp[2..4]);
        let ((t0, y0), (t1, y1)) = (seg[0], seg[1]);
        if t == t1 {
            return Ok(y1);
        }
        Ok(y0 + (y1 - y0) * (t - t0) / (t1 - t0))
    }

    pub fn ramp_at(&self, t: f64) -> Result<f64> {
        let horizon = self.horizon;
        if t.is_nan() || t < 0.0 || t > horizon * (1.0 + 1e-12) {
            return Err(DispatchError::OutOfDomain { t, horizon });
        }
        Ok(if t < horizon / 6.0 {
            self.qdot0
        } else if t <= 5.0 * horizon / 6.0 {
            0.0
        } else {
            self.qdot_t
        })
    }

    /// Trapezoid energy over the breakpoints, MWh.
    pub fn energy(&self) -> f64 {
        self.breakpoints()
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum()
    }
}
