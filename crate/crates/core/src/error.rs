use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("AR coefficient {0} is not inside (-1, 1)")]
    NonStationary(f64),

    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("block length {l} is not in 1..={n}")]
    BlockLength { l: usize, n: usize },

    #[error("series is empty")]
    EmptySeries,

    #[error("series contains a non-finite value at index {0}")]
    NonFinite(usize),

    #[error("series of length {0} cannot be split into equal halves")]
    OddLength(usize),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("distribution function returned {0}, outside [0, 1]")]
    CdfOutOfRange(f64),

    #[error("estimator {estimator} does not accept smoothing parameter {parameter}")]
    UnsupportedParameter {
        estimator: &'static str,
        parameter: &'static str,
    },
}
