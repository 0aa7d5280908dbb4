//! Multi-hour cost accounting with schedule error carry-over.
//!
//! Each hour the net load misses its schedule by a Gaussian error. The energy
//! left over (scheduled minus delivered) is added to the next hour's
//! schedule, so the carry chain is walked in hour order. Costs for each hour
//! are then independent and are evaluated through [`Execution`].
//!
//! Error draws come from a ChaCha8 stream per hour, seeded with
//! SplitMix64(`seed`, `hour`), so a draw depends only on the seed and the
//! hour index and never on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::basecase::build_base_profile;
use crate::controller::{sample_dispatch, DiscreteTrajectory, SampleMode};
use crate::cost::{base_case_cost, discrete_cost, optimal_cost};
use crate::error::{DispatchError, Result};
use crate::exec::Execution;
use crate::trajectory::{solve_hour, HourSchedule, PriceSet, Regime, TrajectoryParams};

/// Update interval used when none is given, s.
pub const DEFAULT_STEP_SECONDS: f64 = 300.0;

/// One row of an hourly price and schedule series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourRecord {
    pub hour: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(rename = "Qz")]
    pub qz: f64,
    #[serde(rename = "Q0")]
    pub q0: f64,
    #[serde(rename = "QT")]
    pub qt: f64,
    #[serde(rename = "ET")]
    pub et: f64,
}

impl HourRecord {
    pub fn prices(&self) -> Result<PriceSet> {
        PriceSet::new(self.a, self.b, self.c, self.qz)
    }
}

/// Gaussian schedule error, MW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    pub mean: f64,
    pub std: f64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self {
            mean: 0.0,
            std: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub hours: Vec<HourRecord>,
    pub error: ErrorModel,
    pub seed: u64,
    /// Update interval, s.
    pub t_s: f64,
    pub mode: SampleMode,
    /// Start each hour from the previous hour's last dispatch sample.
    pub chaining: bool,
}

impl ScenarioConfig {
    pub fn new(hours: Vec<HourRecord>) -> Self {
        Self {
            hours,
            error: ErrorModel::default(),
            seed: 0,
            t_s: DEFAULT_STEP_SECONDS,
            mode: SampleMode::Sampled,
            chaining: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hours.is_empty() {
            return Err(DispatchError::EmptyInput);
        }
        if !(self.error.std.is_finite() && self.error.std >= 0.0) {
            return Err(DispatchError::InvalidConfig(format!(
                "error std must be finite and non-negative, got {}",
                self.error.std
            )));
        }
        if !self.error.mean.is_finite() {
            return Err(DispatchError::InvalidConfig(format!(
                "error mean must be finite, got {}",
                self.error.mean
            )));
        }
        crate::controller::step_count(1.0, self.t_s)?;
        Ok(())
    }

    /// Copy with every hour's ramping price scaled by `factor`.
    pub fn with_ramp_scale(&self, factor: f64) -> Self {
        let mut cfg = self.clone();
        for h in &mut cfg.hours {
            h.c *= factor;
        }
        cfg
    }

    /// Copy with every hour's energy price scaled by `factor`.
    pub fn with_energy_scale(&self, factor: f64) -> Self {
        let mut cfg = self.clone();
        for h in &mut cfg.hours {
            h.a *= factor;
        }
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HourResult {
    pub hour: usize,
    pub regime: Regime,
    /// Continuous optimal cost, $.
    pub c_opt: f64,
    /// Conventional dispatch cost, $.
    pub c_base: f64,
    /// Discrete dispatch cost, $.
    pub c_star: f64,
    /// `c_base - c_star`, $.
    pub savings: f64,
    /// Energy actually served, MWh.
    pub energy_delivered: f64,
    /// Scheduled minus delivered energy handed to the next hour, MWh.
    pub carried_error: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-hour generator for the schedule error stream.
pub fn hour_rng(seed: u64, hour: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(hour as u64)))
}

/// Schedule error for `hour`, MW.
pub fn schedule_error(model: &ErrorModel, seed: u64, hour: usize) -> Result<f64> {
    let normal = Normal::new(model.mean, model.std)
        .map_err(|e| DispatchError::InvalidConfig(format!("error model: {e}")))?;
    Ok(normal.sample(&mut hour_rng(seed, hour)))
}

/// Errors for hours `0..n`.
pub fn error_stream(model: &ErrorModel, seed: u64, n: usize) -> Result<Vec<f64>> {
    (0..n).map(|h| schedule_error(model, seed, h)).collect()
}

struct PlannedHour {
    prices: PriceSet,
    schedule: HourSchedule,
    params: TrajectoryParams,
    dispatch: DiscreteTrajectory,
    delivered: f64,
    carried: f64,
}

fn plan_hours(cfg: &ScenarioConfig) -> Result<Vec<PlannedHour>> {
    let mut planned: Vec<PlannedHour> = Vec::with_capacity(cfg.hours.len());
    let mut carried_in = 0.0;
    for (index, rec) in cfg.hours.iter().enumerate() {
        let step = || -> Result<PlannedHour> {
            let prices = rec.prices()?;
            let q0 = match planned.last() {
                Some(prev) if cfg.chaining => prev.dispatch.last(),
                _ => rec.q0,
            };
            let schedule = HourSchedule::new(q0, rec.qt, rec.et + carried_in)?;
            let params = solve_hour(&prices, &schedule)?;
            let dispatch = sample_dispatch(&params, cfg.t_s, cfg.mode)?;
            let error = schedule_error(&cfg.error, cfg.seed, index)? * schedule.horizon();
            let delivered = dispatch.energy() + error;
            Ok(PlannedHour {
                prices,
                schedule,
                params,
                delivered,
                carried: schedule.energy() - delivered,
                dispatch,
            })
        };
        let hour = step().map_err(|e| e.at_hour(index))?;
        carried_in = hour.carried;
        planned.push(hour);
    }
    Ok(planned)
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<HourResult>> {
    run_scenario_with(cfg, Execution::default())
}

pub fn run_scenario_with(cfg: &ScenarioConfig, exec: Execution) -> Result<Vec<HourResult>> {
    cfg.validate()?;
    let planned = plan_hours(cfg)?;
    let indexed: Vec<(usize, &PlannedHour)> = planned.iter().enumerate().collect();
    exec.map(&indexed, |&(index, h)| {
        let c_opt = optimal_cost(&h.params).total;
        let c_base = base_case_cost(&h.prices, &h.schedule).total;
        let c_star = discrete_cost(&h.dispatch, &h.prices).map_err(|e| e.at_hour(index))?;
        debug_assert!(build_base_profile(&h.schedule).qe.is_finite());
        Ok(HourResult {
            hour: index,
            regime: h.params.regime(),
            c_opt,
            c_base,
            c_star,
            savings: c_base - c_star,
            energy_delivered: h.delivered,
            carried_error: h.carried,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ScenarioTotals {
    pub c_opt: f64,
    pub c_base: f64,
    pub c_star: f64,
    pub savings: f64,
}

pub fn totals(results: &[HourResult]) -> ScenarioTotals {
    results.iter().fold(ScenarioTotals::default(), |acc, r| ScenarioTotals {
        c_opt: acc.c_opt + r.c_opt,
        c_base: acc.c_base + r.c_base,
        c_star: acc.c_star + r.c_star,
        savings: acc.savings + r.savings,
    })
}

/// Values sorted in descending order; the `i`-th entry is met or exceeded in
/// `i + 1` hours.
#[derive(Debug, Clone, PartialEq)]
pub struct DurationCurve {
    pub values: Vec<f64>,
}

impl DurationCurve {
    /// `(hours at or above, value)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (i + 1, v))
    }
}

pub fn duration_curve(values: &[f64]) -> Result<DurationCurve> {
    if values.is_empty() {
        return Err(DispatchError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    Ok(DurationCurve { values: sorted })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub factor: f64,
    pub total_savings: f64,
}

pub fn sensitivity_sweep(cfg: &ScenarioConfig, c_factors: &[f64]) -> Result<Vec<SensitivityRow>> {
    sensitivity_sweep_with(cfg, c_factors, Execution::default())
}

/// Re-runs the scenario with every ramping price scaled by each factor.
pub fn sensitivity_sweep_with(
    cfg: &ScenarioConfig,
    c_factors: &[f64],
    exec: Execution,
) -> Result<Vec<SensitivityRow>> {
    if c_factors.is_empty() {
        return Err(DispatchError::EmptyInput);
    }
    if let Some(bad) = c_factors.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
        return Err(DispatchError::InvalidConfig(format!(
            "ramping price factor must be positive, got {bad}"
        )));
    }
    exec.map(c_factors, |&factor| {
        let results = run_scenario_with(&cfg.with_ramp_scale(factor), exec)?;
        Ok(SensitivityRow {
            factor,
            total_savings: totals(&results).savings,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenewableLevel {
    /// Energy-dominated prices; `c` is `b` times 12 seconds.
    Low,
    /// Ramping-dominated prices; `c` is `b` times 49 hours, with curtailment
    /// hours at zero energy price.
    High,
}

/// Seeded synthetic hourly series around a 100 GW system.
///
/// Boundary loads follow a daily and a seasonal cycle plus AR(1) noise; each
/// hour's energy is the Simpson integral through a perturbed mid-hour load.
pub fn synthetic_year(hours: usize, seed: u64, level: RenewableLevel) -> Vec<HourRecord> {
    use std::f64::consts::PI;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut noise = 0.0;
    let mut load = |t: f64, rng: &mut ChaCha8Rng| {
        noise = 0.8 * noise + 1500.0 * unit.sample(rng);
        100_000.0
            + 12_000.0 * (2.0 * PI * (t - 9.0) / 24.0).sin()
            + 6_000.0 * (2.0 * PI * t / 8760.0).cos()
            + noise
    };
    let mut boundary = load(0.0, &mut rng);
    let mut out = Vec::with_capacity(hours);
    for h in 0..hours {
        let t = h as f64;
        let mid = load(t + 0.5, &mut rng);
        let end = load(t + 1.0, &mut rng);
        let et = (boundary + 4.0 * mid + end) / 6.0;
        let hour_of_day = h % 24;
        let scarcity = 0.75 + 0.5 * (mid - 88_000.0) / 24_000.0;
        let (a, b, c, qz) = match level {
            RenewableLevel::Low => {
                let a = 1.27e-3 * scarcity;
                (a, a, a * 12.0 / 3600.0, 5_000.0)
            }
            RenewableLevel::High => {
                let nominal = 6.34e-4 * scarcity;
                let solar_surplus = (10..15).contains(&hour_of_day) && unit.sample(&mut rng) > 0.3;
                let a = if solar_surplus { 0.0 } else { nominal };
                (a, a, 49.0 * nominal, 20_000.0)
            }
        };
        out.push(HourRecord {
            hour: h as u32,
            a,
            b,
            c,
            qz,
            q0: boundary,
            qt: end,
            et,
        });
        boundary = end;
    }
    out
}
