use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("field size mismatch: expected {expected} values, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("unsupported norm exponent {0} (expected 2, 4 or infinity)")]
    UnsupportedNorm(String),

    #[error("flux n_{plane} = {value} is odd; characteristic classes on T^4 are even")]
    OddFlux { plane: &'static str, value: i64 },

    #[error("dimension mismatch: form has rank {rank}, class has length {len}")]
    DimensionMismatch { rank: usize, len: usize },

    #[error("class {0:?} is not characteristic for the intersection form")]
    NotCharacteristic(Vec<i64>),

    #[error("intersection form is not {0}")]
    InvalidForm(&'static str),

    #[error("unknown intersection form expression: {0}")]
    UnknownForm(String),

    #[error("invalid window parameters: {0}")]
    InvalidWindow(String),

    #[error("enumeration box of {log_size:.2} (natural log of point count) exceeds budget {budget:.2}")]
    EnumerationBudget { log_size: f64, budget: f64 },

    #[error("flow result did not converge; classification refused")]
    NotConverged,

    #[error("invalid flow options: {0}")]
    InvalidOptions(String),
}

pub type Result<T> = std::result::Result<T, Error>;
