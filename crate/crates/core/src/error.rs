use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("quadrature did not converge for {integrand}: estimated error {achieved:e} exceeds target {target:e}")]
    NotConverged {
        integrand: String,
        achieved: f64,
        target: f64,
    },

    #[error("series did not reach tolerance {tol:e} within {iterations} terms")]
    SeriesCap { tol: f64, iterations: usize },

    #[error("pole at {0}")]
    Pole(String),

    #[error("exact division by {divisor} left a remainder in coefficient {index}")]
    InexactDivision { index: usize, divisor: String },

    #[error("ill-conditioned fit: sensitivity {sensitivity:e} exceeds {tol:e} at k = {k}")]
    IllConditioned { k: usize, sensitivity: f64, tol: f64 },

    #[error("routes disagree for {what}: |{a:e} - {b:e}| > {bound:e}")]
    RouteMismatch {
        what: String,
        a: f64,
        b: f64,
        bound: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
