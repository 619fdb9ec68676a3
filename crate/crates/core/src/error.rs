use thiserror::Error;

/// Unified error type for the whole laboratory.
///
/// Variants map one-to-one onto the failure classes the public contracts
/// name: domain violations on mathematical operations, configuration
/// bounds, shape/length contract breaches, numerical degeneracies, and
/// I/O or parse failures on the on-disk formats.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside an operation's mathematical domain (e.g. negative y+).
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested configuration cannot be satisfied; names the violated bound.
    #[error("configuration error: {0}")]
    Config(String),

    /// Caller broke a structural contract (shape or length mismatch).
    #[error("contract error: {0}")]
    Contract(String),

    /// A reference field was identically zero where a normalization needs it.
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    /// The physical case is outside the modeled regime (separation).
    #[error("case rejected: {0}")]
    Rejected(String),

    /// Pool generation could not produce enough converged pairs.
    #[error("pool generation error: {0}")]
    PoolGeneration(String),

    /// No feasible selection exists for the budget request.
    #[error("composition error: {0}")]
    Compose(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed on-disk data; carries file context and line number where known.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
