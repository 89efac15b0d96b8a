use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {name} = {value} is outside the domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature for {what} did not converge (last relative change {last_change:e} after {evaluations} evaluations)")]
    Quadrature {
        what: &'static str,
        last_change: f64,
        evaluations: usize,
    },

    #[error("block {j} is out of band for this grid; admissible J_max = {j_max}")]
    OutOfBand { j: i32, j_max: i32 },

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("operation requires the gamma subordinator")]
    UnsupportedFamily,

    #[error("Picard iteration is not contracting (measured factor {factor:.4}); try a larger lambda")]
    Divergence { factor: f64 },

    #[error("thinning acceptance probability {probability} exceeds one; the coefficient bound a <= 1/c0 is violated")]
    AcceptanceAboveOne { probability: f64 },

    #[error("i/o: {0}")]
    Io(String),

    #[error("malformed field container: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
