use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    Semantic(String),

    #[error("{0}")]
    Validation(String),

    #[error("bit string has length {actual}, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("assignment {0} uses a machine the operation is not eligible for")]
    IneligibleAssignment(String),

    #[error("no feasible schedule fits within horizon {horizon}")]
    HorizonTooSmall { horizon: u32 },

    #[error("exhaustive enumeration refused for {vertices} vertices (limit {limit})")]
    TooLarge { vertices: usize, limit: usize },

    #[error("transposition plan precondition violated: {0}")]
    Plan(String),

    #[error("pruned amplitude mass {0:e} exceeds the exactness budget")]
    PrunedMass(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
