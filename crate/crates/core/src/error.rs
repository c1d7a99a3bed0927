use std::path::PathBuf;

use thiserror::Error;

use crate::network::AgentId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is disconnected: {components} components")]
    DisconnectedGraph { components: usize },

    #[error("invalid edge ({0}, {1}): {2}")]
    InvalidEdge(usize, usize, &'static str),

    #[error("agent {id} out of range for a network of {n} agents")]
    OutOfRange { id: usize, n: usize },

    #[error("no connected graph drawn after {attempts} attempts (n = {n}, p = {p})")]
    GenerationFailed { n: usize, p: f64, attempts: usize },

    #[error("invalid generator parameters: {0}")]
    InvalidGenerator(String),

    #[error("credibility override for ({speaker}, {hearer}) is {value}, outside [0, 1]")]
    OverrideOutOfRange {
        speaker: usize,
        hearer: usize,
        value: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("seed set is empty")]
    EmptySeedSet,

    #[error("agent {0} is a seed and carries no policy target")]
    IsSeed(AgentId),

    #[error("policy weights must be strictly positive (omega_rho_bar = {omega_rho_bar}, omega_u = {omega_u})")]
    NonPositiveWeights { omega_rho_bar: f64, omega_u: f64 },

    #[error("horizon must be at least 1")]
    ZeroHorizon,

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("bad record at row {row}: {message}")]
    BadRecord { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
