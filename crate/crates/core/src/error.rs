use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tolerance {tol:e} not reached within {cap} terms (last width {width:e})")]
    NonConvergent { tol: f64, cap: u64, width: f64 },

    #[error("quadrature on [{a}, {b}] did not converge (estimated error {error:e})")]
    Quadrature { a: f64, b: f64, error: f64 },

    #[error("no sign change of the target on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("degree {degree} exceeds the supported cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("tangent frame is undefined this close to a pole (sin theta = {sin_theta:e})")]
    Pole { sin_theta: f64 },

    #[error("family of size {size} does not fit in a basis of dimension {dim}")]
    SizeOverflow { size: usize, dim: usize },

    #[error("field is identically zero")]
    ZeroField,

    #[error("potential takes the negative value {value:e} at a quadrature node")]
    NegativePotential { value: f64 },

    #[error("symmetric eigensolver failed: {0}")]
    Eigen(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
