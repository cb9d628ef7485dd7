use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (relative residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("bare state |{transmon},{resonator}> has no dressed partner (best overlap {overlap:.3})")]
    AmbiguousLabel { transmon: usize, resonator: usize, overlap: f64 },

    #[error("unknown dressed label |{transmon},{resonator}>")]
    UnknownLabel { transmon: usize, resonator: usize },

    #[error("step size underflow at t = {t} ns (h = {h:.3e})")]
    StepFailure { t: f64, h: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dispersive relation has a negative discriminant: chi = {chi}, detuning = {detuning}")]
    NegativeDiscriminant { chi: f64, detuning: f64 },

    #[error("population never reaches 1/2 on the amplitude grid")]
    NoCrossing,

    #[error("maximum sits on the edge of the frequency window")]
    WindowTooNarrow,

    #[error("trajectory start and end coincide")]
    DegenerateTrajectory,

    #[error("need at least {needed} endpoints, found {found}")]
    InsufficientEndpoints { needed: usize, found: usize },

    #[error("landscape axes differ")]
    AxisMismatch,

    #[error("timer resolution too coarse: {ticks} distinguishable ticks per run")]
    TimerResolution { ticks: u64 },
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
