use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant to its own exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible calibration: no rank offset reaches {target} <= {alpha} (tightest achievable bound {best_bound:.6} at n = {best_n})")]
    InfeasibleCalibration {
        target: &'static str,
        alpha: f64,
        best_bound: f64,
        best_n: usize,
    },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("scenario fault at step {step}: {message}")]
    ScenarioFault { step: usize, message: String },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
