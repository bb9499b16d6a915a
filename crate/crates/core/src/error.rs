use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Flory-Huggins potential evaluated outside the open interval (-1, 1).
    #[error("potential domain error: phase field value {value} outside (-1, 1)")]
    PotentialDomain { value: f64 },

    #[error("energy {e_tot0} lies below the landscape bound |Omega|*E0 = {bound}")]
    EnergyBelowBound { e_tot0: f64, bound: f64 },

    #[error(
        "Newton iteration did not converge after {iters} iterations (residual {residual:.3e})"
    )]
    NonConvergence { iters: usize, residual: f64 },

    #[error("CFL limit exceeded: |u|_inf*dt/h = {cfl:.3e} > {limit}; reduce the time step")]
    Cfl { cfl: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error in {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, SimError>;

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }
}
