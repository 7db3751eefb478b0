//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Model or operation parameters violate an invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested regime is not covered by the closed forms (λ ≥ 0).
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// Input too large for an exact/enumeration method.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Malformed graph/label/curve file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The interpolation rewire step ran out of deletable edges.
    #[error(
        "rewire shortfall: need {needed} N0-N0 edges to delete, only {available} available"
    )]
    RewireShortfall { needed: usize, available: usize },

    /// Operation undefined on an edgeless or otherwise degenerate graph.
    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    /// Observed free energy lies outside the fitted curve range.
    #[error(
        "extrapolation: observed value {observed} outside curve range [{lo}, {hi}]; \
         nearest grid point r = {nearest_r}"
    )]
    Extrapolation {
        observed: f64,
        lo: f64,
        hi: f64,
        nearest_r: f64,
    },

    /// A documented precondition was violated by the caller.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
