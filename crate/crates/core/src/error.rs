use thiserror::Error;

/// Errors produced by the library.
///
/// Variants fall in two families: invalid input (`Domain`, `InvalidParameter`,
/// `Unsupported`, `InsufficientData`, `BudgetExceeded`) and numerical failure
/// (`Convergence`, `Quadrature`, `Numerical`). Front ends map the first family
/// to a validation failure and the second to a computation failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument outside domain ({detail})")]
    Domain { function: &'static str, detail: String },

    #[error("invalid parameter `{field}`: {detail}")]
    InvalidParameter { field: &'static str, detail: String },

    #[error("unsupported request: {0}")]
    Unsupported(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("sample budget exceeded: {requested} draws requested, cap is {cap}")]
    BudgetExceeded { requested: u128, cap: u64 },

    #[error("{function}: no convergence after {iterations} iterations")]
    Convergence { function: &'static str, iterations: usize },

    #[error("quadrature for `{integral}` did not reach tolerance (estimate {estimate:e}, error {error:e})")]
    Quadrature {
        integral: String,
        estimate: f64,
        error: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True when the error comes from bad input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::InvalidParameter { .. }
                | Error::Unsupported(_)
                | Error::InsufficientData(_)
                | Error::BudgetExceeded { .. }
        )
    }

    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn param(field: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
