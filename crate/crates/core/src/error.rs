use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("density {0} outside [0, 1]")]
    DensityOutOfRange(f64),

    #[error("flux {flux} exceeds the capacity {sigma}")]
    InfeasibleFlux { flux: f64, sigma: f64 },

    #[error("invalid flux function: {0}")]
    InvalidDiagram(String),

    #[error("state (rho={rho}, q={q}) outside the invariant region")]
    InvalidState { rho: f64, q: f64 },

    #[error("characteristic speed unbounded at rho=1 with q={0}")]
    UnboundedSpeed(f64),

    #[error("node input ({name}={value}) outside [0, 1]")]
    NodeInput { name: &'static str, value: f64 },

    #[error("node capacity {name}={value} outside [0, sigma]")]
    NodeCapacity { name: &'static str, value: f64 },

    #[error("layer equation is singular at zero flux")]
    SingularLayer,

    #[error("oracle found no admissible candidate for rho_b={0:?}")]
    OracleFailure([f64; 3]),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invariant region violated on edge {edge}, cell {cell}: rho={rho}, z={z}")]
    InvariantViolation {
        edge: usize,
        cell: usize,
        rho: f64,
        z: f64,
    },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("malformed csv {path}: {message}")]
    Csv { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_density(rho: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&rho) {
        Ok(rho)
    } else {
        Err(Error::DensityOutOfRange(rho))
    }
}
