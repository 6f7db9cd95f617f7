//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by exact arithmetic, series evaluation, and the radial
/// verification pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("fraction denominator is zero")]
    ZeroDenominator,

    #[error("tau must lie in the upper half-plane (Im tau = {0})")]
    NotUpperHalfPlane(f64),

    #[error("pole proximity in {context} at n = {n}: |factor| = {magnitude:.3e}")]
    PoleProximity {
        context: &'static str,
        n: i64,
        magnitude: f64,
    },

    #[error("{context}: series did not converge within {max_terms} terms")]
    Truncation {
        context: &'static str,
        max_terms: usize,
    },

    #[error("classification violated at term n = {n}: net vanishing order {net_order}")]
    ClassificationViolation { n: usize, net_order: i64 },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("only {usable} usable grid points (need at least 4)")]
    InsufficientData { usable: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
