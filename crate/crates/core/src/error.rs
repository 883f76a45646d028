//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("refinement {0} exceeds the maximum of 8 (20*4^8 panels)")]
    RefinementTooLarge(usize),

    #[error("mesh is not watertight: edge ({a}, {b}) is shared by {count} panel(s), expected 2")]
    NotWatertight { a: usize, b: usize, count: usize },

    #[error("mesh orientation is inverted or degenerate: signed volume {0:.6e}")]
    BadOrientation(f64),

    #[error("panel {index} is degenerate: area {area:.6e}")]
    DegeneratePanel { index: usize, area: f64 },

    #[error("mesh file error: {0}")]
    MeshFile(String),

    #[error("singular kernel evaluation: source and target coincide")]
    SingularKernel,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expression error: {0}")]
    Expression(String),

    #[error("linear solver failure: {0}")]
    Solver(String),

    #[error("cloud generation failed: {0}")]
    CloudGeneration(String),
}

impl Error {
    /// True for precondition/validation failures (as opposed to runtime
    /// solver breakdowns). The CLI maps these to distinct exit codes.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Solver(_))
    }
}
