//! Error type shared across the library.
//!
//! Variants are grouped by *kind of failure* rather than by module, so the
//! CLI can map them onto stable exit codes: configuration problems, bad data
//! or violated preconditions, hard cost guards, and numerical-integrity
//! failures are all distinguishable by the caller.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix/vector shapes do not line up (non-square input, length
    /// mismatch, zero-dimensional request).
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Input is the right shape but outside the operation's domain
    /// (photon-number mismatch, β = 1 for the Rényi entropy, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// A hard cost guard was hit (permanent size limits, output-state
    /// enumeration cap). Exponential work fails loudly instead of hanging.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Malformed configuration (mesh cell list, generator config file).
    #[error("configuration error: {0}")]
    Config(String),

    /// A label or key did not resolve (unknown mesh parameter label).
    #[error("lookup error: {0}")]
    Lookup(String),

    /// A computed quantity failed an internal consistency check
    /// (distribution normalization residual, unnormalized entropy input).
    #[error("numerical integrity error: {0}")]
    NumericalIntegrity(String),

    /// The configured source cannot produce bits: every mode's retention
    /// probability is zero and the attempt budget was exhausted.
    #[error("no entropy: {0}")]
    NoEntropy(String),

    /// A statistical test was given fewer bits than its minimum.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// File I/O failure (matrix/mesh/bit-file loading).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure for matrices, meshes, or reports.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
