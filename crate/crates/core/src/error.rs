use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} exceeds the enumeration cap of {cap}")]
    EnumerationCap {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("array length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("negative mass {value:e} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("masses sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("generator matrix is not of full row rank ({rank} < {rows})")]
    RankDeficient { rank: usize, rows: usize },

    #[error("code has no nonzero codewords")]
    TrivialCode,

    #[error("failed to sample a full-rank {rows}x{cols} matrix after {attempts} attempts")]
    SamplingFailed {
        rows: usize,
        cols: usize,
        attempts: usize,
    },

    #[error("identity violated: {what} (residual {residual:e})")]
    IdentityViolated { what: &'static str, residual: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
