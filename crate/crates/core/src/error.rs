use thiserror::Error;

use crate::trajectory::Regime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispatchError {
    #[error("degenerate prices: energy price a={a} and ramping price c={c} are both zero")]
    DegeneratePrices { a: f64, c: f64 },

    #[error("invalid price `{field}` = {value}: must be finite and non-negative")]
    InvalidPrice { field: &'static str, value: f64 },

    #[error("invalid schedule `{field}` = {value}: {reason}")]
    InvalidSchedule {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("parameter system is singular (det = {det:e})")]
    SingularSystem { det: f64 },

    #[error("time {t} h lies outside the horizon [0, {horizon}] h")]
    OutOfDomain { t: f64, horizon: f64 },

    #[error("operation requires the General regime, got {0:?}")]
    WrongRegime(Regime),

    #[error("update interval {t_s} s does not divide the horizon {horizon} h")]
    BadStep { t_s: f64, horizon: f64 },

    #[error("energy correction needs at least two update intervals")]
    TooFewIntervals,

    #[error("trajectory has fewer than two samples")]
    EmptyTrajectory,

    #[error("input series is empty")]
    EmptyInput,

    #[error("ramp-sign pattern did not settle after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("KKT system is singular")]
    SingularKkt,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("hour {index}: {source}")]
    Hour {
        index: usize,
        #[source]
        source: Box<DispatchError>,
    },
}

impl DispatchError {
    pub(crate) fn at_hour(self, index: usize) -> Self {
        DispatchError::Hour {
            index,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, DispatchError>;
