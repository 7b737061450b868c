//! Sampling and quadrature for band-limited functions on compact manifolds.
//!
//! A function on a compact Riemannian manifold is band-limited with cutoff
//! `omega` when it lies in the span of the Laplace-Beltrami eigenfunctions
//! with eigenvalue at most `omega`. This crate builds the discrete machinery
//! that makes such functions computable from finitely many point samples:
//!
//! * metric `rho`-lattices whose points are at least `rho/2` apart and leave
//!   no gap of radius more than `rho/2` ([`lattice`]),
//! * sampling frames and exact reconstruction from lattice values ([`frames`]),
//! * cubature rules that integrate every band-limited function exactly, with
//!   an optional positivity correction ([`cubature`]),
//! * variational interpolating splines on lattice nodes ([`splines`]),
//! * products of band-limited functions and the discrete Fourier transform
//!   they enable on compact homogeneous spaces ([`homogeneous`]).
//!
//! Three concrete manifolds are supported end to end: the unit circle, the
//! flat square 2-torus, and the unit 2-sphere. All spectral computations use
//! real orthonormal eigenbases and are exact up to floating point roundoff at
//! the scales the library targets, so most claims the API makes (exactness of
//! a cubature rule, reconstruction error, frame bounds) can be checked
//! directly in tests.

pub mod cubature;
pub mod error;
pub mod frames;
pub mod homogeneous;
pub mod lattice;
pub mod manifold;
pub mod spectral;
pub mod splines;

pub use cubature::{CubatureRule, Construction};
pub use error::{Error, Result};
pub use frames::SamplingMatrix;
pub use homogeneous::ProductReport;
pub use lattice::{Lattice, LatticeReport, VoronoiWeights};
pub use manifold::{Manifold, ManifoldKind, Mode, Point};
pub use spectral::SpectralFunction;
pub use splines::SplineModel;
