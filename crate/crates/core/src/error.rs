use thiserror::Error;

use crate::semiring::Violation;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library.
///
/// `Consistency` is reserved for outcomes that contradict a proven
/// structural fact (a gluing that fails to restrict, two sides of an
/// equivalence that disagree). It can only indicate a bug in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed table: {0}")]
    Malformed(String),

    #[error("structure violates {} axiom instance(s); first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    AxiomViolations(Vec<Violation>),

    #[error("carrier of size {size} exceeds the exhaustive cap {cap}; supply generators instead of enumerating")]
    CapExceeded { size: usize, cap: usize },

    #[error("index {index} out of range for carrier of size {size}")]
    OutOfRange { index: usize, size: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("sections disagree on the overlap of cover elements {i} and {j}")]
    IncompatibleSections { i: usize, j: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (max off-diagonal {max_off_diagonal:e})")]
    NonConvergence { sweeps: usize, max_off_diagonal: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Consistency(_))
    }
}
