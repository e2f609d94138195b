use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("matrix is singular to working precision (smallest singular value {smallest_singular_value:e})")]
    Singular { smallest_singular_value: f64 },

    #[error("zeta function has a pole at s = {s} (residue {residue})")]
    Pole { s: f64, residue: f64 },

    #[error("chain condition fails in degree {degree}: |d o d| = {defect:e}")]
    Structural { degree: usize, defect: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("cocycle is not flat on triangle {triangle:?} (defect {defect:e})")]
    Flatness { triangle: [usize; 3], defect: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
