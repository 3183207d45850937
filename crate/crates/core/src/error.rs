//! Crate-wide error type.

use thiserror::Error;

/// Alias used by every fallible operation in the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input angle outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Derivative requested at a singular point (theta = 0 mod pi).
    #[error("singular angle: {0}")]
    SingularAngle(String),

    /// Tetrahedron angles rejected at construction.
    #[error("invalid tetrahedron angles: {0}")]
    InvalidAngles(String),

    /// Malformed gluing data; names the offending tetrahedron and face.
    #[error("bad gluing at tet {tet} face {face}: {reason}")]
    Gluing { tet: usize, face: usize, reason: String },

    /// Complex fails a topological requirement (orientability, disk links, ...).
    #[error("unsupported topology: {0}")]
    Topology(String),

    /// Sizes or indices inconsistent with the complex.
    #[error("shape mismatch: {0}")]
    Mismatch(String),

    /// Target totals admit no angle assignment at all.
    #[error("infeasible targets: {reason}")]
    Infeasible { reason: String, certificate: Vec<(String, f64)> },

    /// Numerical routine lost a structural invariant (not a user error).
    #[error("internal consistency failure: {0}")]
    Internal(String),

    /// Developing map prerequisites violated or certification failed.
    #[error("develop error: {0}")]
    Develop(String),

    /// Degenerate point configuration for Delaunay / hull construction.
    #[error("degenerate configuration: {0}")]
    DegenerateInput(String),

    /// Flip precondition violated on an exact angle chart.
    #[error("flip error: {0}")]
    Flip(String),
}
