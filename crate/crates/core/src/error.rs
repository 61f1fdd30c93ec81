use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error(
        "hypergeometric series lost precision at z = {z}: estimated relative error {estimate:e}"
    )]
    LossOfPrecision { z: f64, estimate: f64 },

    #[error("hypergeometric series did not converge at z = {z} after {terms} terms")]
    SeriesNonConvergence { z: f64, terms: usize },

    #[error("argument out of range for the series path: |z| = {z} exceeds {limit}")]
    OutOfRange { z: f64, limit: f64 },

    #[error("non-finite value of the input function at r = {r}")]
    NonFiniteSample { r: f64 },

    #[error("non-finite series term for atom {atom} at p = {p}")]
    NonFiniteTerm { atom: String, p: f64 },

    #[error("Gram system is ill-conditioned (condition estimate {estimate:e})")]
    IllConditioned { estimate: f64 },

    #[error("quadrature did not converge on [{a}, {b}] within {limit} panels")]
    QuadratureNonConvergence { a: f64, b: f64, limit: usize },

    #[error("invalid input data: {0}")]
    InputData(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the error stems from a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::LossOfPrecision { .. }
                | Error::SeriesNonConvergence { .. }
                | Error::OutOfRange { .. }
                | Error::NonFiniteTerm { .. }
                | Error::IllConditioned { .. }
                | Error::QuadratureNonConvergence { .. }
                | Error::GammaPole(_)
        )
    }
}
