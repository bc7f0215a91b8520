//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A gamma-ratio numerator sits on a pole while the denominator does not.
    /// The pole conventions only cover denominator poles; anything else is a
    /// misaligned kernel argument and must not produce a silent value.
    #[error("kernel singularity: gamma-ratio numerator pole at {x}")]
    KernelSingularity { x: f64 },

    #[error("insufficient samples: need at least {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },

    #[error("grid misalignment: {0}")]
    GridMisalignment(String),

    #[error("invalid order: alpha must be positive and finite, got {0}")]
    InvalidOrder(f64),

    #[error("alternative form undefined at integer order {0}")]
    AlternativeFormIntegerOrder(f64),

    /// Operator spec and operation disagree (wrong kind or formulation).
    #[error("operator spec mismatch: {0}")]
    SpecMismatch(String),

    #[error("unknown id: {0}")]
    UnknownCheck(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
