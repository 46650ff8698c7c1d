use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("empty domain: {0}")]
    Domain(String),

    /// Bisection on the budget multiplier could not bracket or converge.
    #[error("budget projection failed to bracket the multiplier in [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("sample {index} produced a non-finite {what}")]
    Sample { index: usize, what: &'static str },

    #[error("Cauchy search found no acceptable step length after {halvings} halvings")]
    CauchyFailure { halvings: usize },

    #[error("step violates fraction of Cauchy decrease: pred {pred:e} < bound {bound:e}")]
    FcdViolation { pred: f64, bound: f64 },

    #[error("diagnostics unavailable: {0}")]
    Diagnostic(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
