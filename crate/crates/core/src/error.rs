use thiserror::Error;

/// Errors raised by the distribution, moment and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CtpError {
    #[error("{name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("coefficients do not define a distribution: mixing density reaches {min_value} at t = {argmin_t}")]
    InvalidDistribution { min_value: f64, argmin_t: f64 },

    #[error("family {family} takes {expected} parameter(s), got {got}")]
    DimensionMismatch {
        family: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("moment of order {order} does not exist for alpha = {alpha} (requires alpha > {order})")]
    MomentDoesNotExist { order: u32, alpha: f64 },

    #[error("hazard undefined at x = {x}: survival underflows to zero")]
    SurvivalUnderflow { x: f64 },

    #[error("root finding did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("information criteria need n > p + 1 (n = {n}, p = {p})")]
    TooFewObservations { n: usize, p: usize },

    #[error("unknown family '{0}'")]
    UnknownFamily(String),

    #[error("invalid fit configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T, E = CtpError> = std::result::Result<T, E>;
