use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms (last partial sum {partial})")]
    NonConvergence { terms: usize, partial: f64 },

    #[error("total degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("pole: |P(z, w)| = {value:e} is below threshold {threshold:e}")]
    Pole { value: f64, threshold: f64 },

    #[error("quadrature did not self-converge: |I_q - I_2q| = {diff:e} at q = {q}")]
    QuadratureConvergence { q: usize, diff: f64 },

    #[error("malformed polynomial json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
