use thiserror::Error;

/// Errors produced by the model, the simulator and the planner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates a model invariant. `field` names the offending
    /// input (or the inequality that failed).
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: String, reason: String },

    #[error("unknown parameter `{0}`")]
    UnknownParam(String),

    #[error("failed to parse configuration: {0}")]
    Config(String),

    /// Adaptive quadrature did not reach its tolerance within the interval cap.
    #[error("quadrature did not converge: estimate {estimate:e} after {intervals} intervals")]
    QuadratureFailed { estimate: f64, intervals: usize },

    /// An operation that only holds for the open-park scenario (no static
    /// blockage) was called with static blockages present.
    #[error("operation requires the open-park scenario (static blockage density must be 0)")]
    RequiresOpenPark,

    /// A density search could not meet the requested target inside the bracket.
    #[error("target {target:e} is infeasible; best achievable at {density_per_m2:e} BS/m2 is {achievable:e}")]
    Infeasible {
        target: f64,
        density_per_m2: f64,
        achievable: f64,
    },

    #[error("simulation setup: {0}")]
    Simulation(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for failures caused by bad input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParam { .. }
                | Error::UnknownParam(_)
                | Error::Config(_)
                | Error::RequiresOpenPark
                | Error::Simulation(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
