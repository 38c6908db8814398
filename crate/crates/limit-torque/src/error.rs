use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector argument did not match the expected joint count.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A lower bound exceeded the corresponding upper bound.
    #[error("invalid bounds at joint {joint}: lower {lo} > upper {hi}")]
    InvalidBounds { joint: usize, lo: f64, hi: f64 },

    /// Strict inverse transform received a state outside the feasible box.
    #[error("joint {joint} outside the feasible box: {value} not in ({lo}, {hi})")]
    OutOfBox {
        joint: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A model parameter violated its physical constraint.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A controller intermediate came out non-finite.
    #[error("non-finite value in controller term `{term}`")]
    NonFinite { term: &'static str },

    /// The mass matrix failed its Cholesky factorization.
    #[error("mass matrix not positive definite at the queried configuration")]
    SingularMassMatrix,

    /// Scenario configuration rejected, with the offending field path.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
