use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent caller input.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("matrix is not symmetric (asymmetry {asymmetry:.3e} exceeds {allowed:.3e})")]
    Asymmetric { asymmetry: f64, allowed: f64 },

    /// First failing pivot, 1-based.
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("matrix is singular (pivot {pivot} below threshold)")]
    Singular { pivot: usize },

    #[error("{what} did not converge after {iterations} iterations{}", fmt_estimate(.estimate))]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        estimate: Option<f64>,
    },

    #[error("walk enumeration exceeded {cap} walks; use a smaller horizon")]
    EnumerationCap { cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn fmt_estimate(estimate: &Option<f64>) -> String {
    match estimate {
        Some(v) => format!(" (partial estimate {v})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn dims(
        context: impl Into<String>,
        expected: impl std::fmt::Display,
        found: impl std::fmt::Display,
    ) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// True for errors caused by the numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::EnumerationCap { .. }
                | Error::Numerical(_)
                | Error::Singular { .. }
        )
    }
}
