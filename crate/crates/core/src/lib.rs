//! Minimum-cost power dispatch under energy, power and ramping prices.
//!
//! [`solve_hour`] returns the continuous optimal trajectory for one hour,
//! [`optimal_cost`] and [`base_case_cost`] price it against the conventional
//! piecewise-linear schedule, [`sample_dispatch`] turns it into a
//! fixed-interval controller sequence, and [`run_scenario`] runs many hours
//! with schedule-error carry-over. [`oracle`] holds a brute-force solver used
//! to cross-check the closed forms.

pub mod basecase;
pub mod controller;
pub mod cost;
pub mod error;
pub mod exec;
pub mod numerics;
pub mod oracle;
pub mod simulator;
pub mod trajectory;

pub use basecase::{build_base_profile, BaseProfile};
pub use controller::{make_coefficients, sample_dispatch, step_count, ControllerCoefficients, DiscreteTrajectory, SampleMode};
pub use cost::{base_case_cost, discrete_cost, discrete_cost_breakdown, is_minimizer, optimal_cost, CostBreakdown, SecondVariation};
pub use error::{DispatchError, Result};
pub use exec::Execution;
pub use oracle::{solve_numeric, OracleSolution};
pub use simulator::{
    duration_curve, run_scenario, run_scenario_with, sensitivity_sweep, sensitivity_sweep_with, synthetic_year, totals,
    DurationCurve, ErrorModel, HourRecord, HourResult, RenewableLevel, ScenarioConfig, ScenarioTotals, SensitivityRow,
};
pub use trajectory::{
    build_parameter_system, classify_regime, solve_hour, HourSchedule, ParameterSystem, PriceSet, Regime, TrajectoryParams,
};
