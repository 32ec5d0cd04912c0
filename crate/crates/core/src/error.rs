use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("index ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("degenerate cell {cell}: det J = {det:e}")]
    DegenerateCell { cell: usize, det: f64 },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("singular matrix encountered in {0}")]
    Singular(&'static str),

    #[error("incompatible pressure load: constant-mode residual {residual:e} exceeds {tolerance:e}")]
    IncompatibleLoad { residual: f64, tolerance: f64 },

    #[error("division by zero while evaluating an expression")]
    DivisionByZero,

    #[error("report parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
