use thiserror::Error;

use crate::analytic::Phase;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid choice vector: {0}")]
    InvalidChoice(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    /// The requested object only exists outside the condensation phase.
    #[error("alpha = {alpha} is in the {phase} phase (alpha_c = {alpha_c})")]
    Phase { alpha: f64, alpha_c: f64, phase: Phase },

    #[error("domain error: {0}")]
    Domain(String),

    /// The single-peak saddle-point expansion does not apply to this choice vector.
    #[error("saddle-point approximation invalid: {0}")]
    Shape(String),

    #[error("state too large for exact enumeration: {vertices} vertices, r = {r} (limit {max_vertices} vertices, r <= {max_r})")]
    Size {
        vertices: usize,
        r: usize,
        max_vertices: usize,
        max_r: usize,
    },

    #[error("not enough usable points: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;
