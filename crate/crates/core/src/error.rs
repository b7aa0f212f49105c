use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TunnelError {
    #[error("Lévy index alpha = {0} is outside (1, 2]")]
    AlphaOutOfRange(f64),

    #[error(
        "energy E = {energy} must satisfy 0 < E < V = {v_height} (classically forbidden regime)"
    )]
    EnergyOutOfRange { energy: f64, v_height: f64 },

    #[error("parameter {name} = {value} is invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("number of barriers must be at least 1")]
    NoBarriers,

    #[error("non-finite value produced by {what} at E = {energy}")]
    NonFinite { what: &'static str, energy: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, TunnelError>;
