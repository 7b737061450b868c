use crate::manifold::ManifoldKind;

/// Errors reported by lattice construction, frame analysis, cubature and the
/// spectral transforms.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The requested mesh norm exceeds the manifold diameter, so a lattice
    /// with covering radius `rho/2` cannot exist.
    #[error("rho = {rho} exceeds the manifold diameter {diameter}")]
    RhoTooLarge { rho: f64, diameter: f64 },

    /// `rho` must be strictly positive and finite.
    #[error("rho must be positive and finite, got {0}")]
    InvalidRho(f64),

    /// A point set failed the separation or covering certificate.
    #[error("point set is not a {rho}-lattice: {reason}")]
    NotALattice { rho: f64, reason: String },

    /// The sampling matrix is rank deficient: the nodes cannot distinguish
    /// all functions in the requested band.
    #[error(
        "nodes do not form a sampling frame for cutoff {omega}: \
         rank {rank} < dim {dim}"
    )]
    NotAFrame { omega: f64, rank: usize, dim: usize },

    /// The positivity correction produced a non-positive weight. The
    /// offending weights are returned for diagnosis; retry with a denser
    /// lattice (smaller `rho * sqrt(1 + omega)`).
    #[error(
        "positivity correction failed: min weight {min_weight:.3e}; \
         decrease rho relative to the cutoff"
    )]
    PositivityFailed { min_weight: f64, weights: Vec<f64> },

    /// A coefficient vector extends beyond the stated cutoff.
    #[error("function has spectral content above its stated cutoff {omega}")]
    CutoffExceeded { omega: f64 },

    /// A discrete Fourier transform was requested with a rule whose
    /// certified exactness does not reach `4 * group_dim * omega`.
    #[error(
        "cubature rule is exact on cutoff {have} but the transform \
         requires exactness {need}"
    )]
    InsufficientExactness { have: f64, need: f64 },

    /// An eigenbasis truncation left the node evaluation matrix rank
    /// deficient, so an interpolation problem has no unique solution.
    #[error(
        "eigenbasis truncation too small: evaluation matrix has rank {rank} \
         for {nodes} nodes; raise the truncation cutoff"
    )]
    TruncationTooSmall { rank: usize, nodes: usize },

    /// The operation needs closed-form invariant vector fields, which are
    /// only wired up for the circle and the torus.
    #[error("operation is not supported on {0:?}")]
    UnsupportedManifold(ManifoldKind),

    /// A sample or coefficient vector has the wrong length.
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A request violates an operation precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A serialized artifact violates a structural invariant.
    #[error("invalid artifact: {0}")]
    InvalidArtifact(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
