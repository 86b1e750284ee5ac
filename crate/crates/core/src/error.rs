use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("linear system is inconsistent")]
    Inconsistent,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("non-finite prior LLR at column {column} (p = {p})")]
    NonFinitePrior { column: usize, p: f64 },

    #[error("decoder output does not reproduce the syndrome")]
    SyndromeMismatch,

    #[error("no crossing between the supplied curves")]
    NoCrossing,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, found })
    }
}
