use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error("truncation overflow: {0}")]
    Truncation(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    Normalization { norm_sqr: f64 },
    #[error("matrix is not unitary (defect {defect:e})")]
    Unitarity { defect: f64 },
    #[error("spectrum not contained in grid: {0}")]
    GridCoverage(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("time step too large: c*dt = {c_dt:e} must be below dx/4 = {limit:e}")]
    StepSize { c_dt: f64, limit: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("passivity violated: n'' = {0} < 0")]
    Passivity(f64),
    #[error("pulse support reaches the periodic boundary: {0}")]
    Support(String),
    #[error("unknown port: {0}")]
    Port(String),
    #[error("invalid netlist: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
