use thiserror::Error;

use crate::certify::Witness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: i64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("{what} has size {size}, above the cap of {cap}{hint}")]
    CapExceeded {
        what: &'static str,
        size: String,
        cap: u64,
        hint: &'static str,
    },

    #[error("duplicate word: indices {first} and {second} hold the same point")]
    DuplicateWord { first: usize, second: usize },

    #[error("orthogonality fails: {0}")]
    Orthogonality(Box<Witness>),

    #[error("quadrature did not converge (achieved residual {residual:e})")]
    Quadrature { residual: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            Error::Orthogonality(_) => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
