use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("step {k} out of range 0..={n}")]
    StepOutOfRange { k: i64, n: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NotARoot { residual: f64, tolerance: f64 },

    #[error("window too small: interior width {interior} < {required}")]
    WindowTooSmall { interior: usize, required: usize },

    #[error("series did not converge within n_stop = {n_stop}")]
    Unconverged { n_stop: usize },

    #[error("crossing not confirmed at g = {g:.12}: {reason}")]
    CrossingUnconfirmed { g: f64, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}
