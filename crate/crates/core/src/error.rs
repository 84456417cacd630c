use thiserror::Error;

/// Errors raised by the toolkit's operators and generators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("width {width} is not a positive integer multiple of the grid step {dt}")]
    GridMismatch { width: f64, dt: f64 },

    #[error("grid too short: {0}")]
    Grid(String),

    #[error("contraction violated: |d_{index}| = {value} is not below 1")]
    Contraction { index: usize, value: f64 },

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("|psi| = {modulus:e} is below the node threshold at x = {x}, t = {t}")]
    Node { x: f64, t: f64, modulus: f64 },

    #[error("degenerate fit: {0}")]
    Fit(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
