//! Cubature rules over lattice nodes: exact minimal-norm weights, positive
//! weights built by correcting Voronoi measures inside the sample space, and
//! error reports comparing the cubature defect against the smoothness of the
//! integrand.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::SamplingMatrix;
use crate::lattice::{Lattice, VoronoiWeights};
use crate::manifold::Manifold;
use crate::spectral::SpectralFunction;

/// Relative tolerance on the exactness residual accepted when a rule is
/// validated (construction and deserialization).
const EXACTNESS_TOL: f64 = 1e-9;

/// How a rule's weights were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    MinNorm,
    PositiveCorrected,
    VoronoiPlain,
    Spline,
}

/// A weighted node set `Σ_k w_k f(x_k)` that reproduces `∫f` exactly for
/// every f in `E_omega`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CubatureRepr", into = "CubatureRepr")]
pub struct CubatureRule {
    lattice: Lattice,
    weights: Vec<f64>,
    omega: f64,
    positive: bool,
    construction: Construction,
}

#[derive(Serialize, Deserialize)]
struct CubatureRepr {
    lattice: Lattice,
    weights: Vec<f64>,
    omega: f64,
    positive: bool,
    construction: Construction,
}

impl From<CubatureRule> for CubatureRepr {
    fn from(r: CubatureRule) -> CubatureRepr {
        CubatureRepr {
            lattice: r.lattice,
            weights: r.weights,
            omega: r.omega,
            positive: r.positive,
            construction: r.construction,
        }
    }
}

impl TryFrom<CubatureRepr> for CubatureRule {
    type Error = Error;

    fn try_from(r: CubatureRepr) -> Result<CubatureRule> {
        let rule = CubatureRule {
            lattice: r.lattice,
            weights: r.weights,
            omega: r.omega,
            positive: r.positive,
            construction: r.construction,
        };
        rule.validate()?;
        Ok(rule)
    }
}

/// Cubature defect of one integrand against the smoothness quantity that
/// controls it: `rhs = Ω_{m-k}(𝓛^k f, 1/ω) / ω^k`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ErrorReport {
    /// `|∫f - Σ_j f_ω(x_j) w_j|` with the integrand projected onto the band;
    /// zero up to round-off for an exact rule.
    pub lhs: f64,
    /// `|∫f - Σ_j f(x_j) w_j|` sampling the integrand itself.
    pub lhs_direct: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub ratio_direct: f64,
}

impl CubatureRule {
    /// Minimal-norm exact weights: the least-squares minimal solution of
    /// `U·w = (√Vol, 0, …, 0)`.
    pub fn exact_weights(matrix: &SamplingMatrix) -> Result<CubatureRule> {
        let w = matrix.min_norm_solve(&matrix.moment_vector())?;
        let weights: Vec<f64> = w.iter().cloned().collect();
        let positive = weights.iter().all(|w| *w > 0.0);
        let rule = CubatureRule {
            lattice: matrix.lattice().clone(),
            weights,
            omega: matrix.omega(),
            positive,
            construction: Construction::MinNorm,
        };
        rule.validate()?;
        Ok(rule)
    }

    /// Positive exact weights: start from Voronoi measures `w`, replace their
    /// sample-space component with the exact solution, `μ = w + P(ν - w)`.
    /// The correction is the smallest exactness repair of `w`, so for dense
    /// lattices it cannot overwhelm the cell measures.
    pub fn positive_weights(
        matrix: &SamplingMatrix,
        voronoi: &VoronoiWeights,
    ) -> Result<CubatureRule> {
        if voronoi.lattice().points() != matrix.lattice().points() {
            return Err(Error::InvalidParameter(
                "voronoi measures belong to a different lattice".into(),
            ));
        }
        let nu = matrix.min_norm_solve(&matrix.moment_vector())?;
        let basis = matrix.row_space_basis()?;
        let w = DVector::from_column_slice(voronoi.measures());
        let mu = &w + basis.transpose() * (basis * (&nu - &w));

        let correction = (&mu - &w).norm();
        let offset = (&nu - &w).norm();
        debug_assert!(correction <= offset * (1.0 + 1e-12));

        let weights: Vec<f64> = mu.iter().cloned().collect();
        let min_weight = weights.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_weight <= 0.0 {
            return Err(Error::PositivityFailed {
                min_weight,
                weights,
            });
        }
        let rule = CubatureRule {
            lattice: matrix.lattice().clone(),
            weights,
            omega: matrix.omega(),
            positive: true,
            construction: Construction::PositiveCorrected,
        };
        rule.validate()?;
        Ok(rule)
    }

    /// Wraps Voronoi measures as a rule that is exact on constants only.
    pub fn from_voronoi(voronoi: &VoronoiWeights) -> CubatureRule {
        CubatureRule {
            lattice: voronoi.lattice().clone(),
            weights: voronoi.measures().to_vec(),
            omega: 0.0,
            positive: true,
            construction: Construction::VoronoiPlain,
        }
    }

    /// Used by the spline module, which certifies its own weights.
    pub(crate) fn from_parts(
        lattice: Lattice,
        weights: Vec<f64>,
        omega: f64,
        construction: Construction,
    ) -> Result<CubatureRule> {
        let positive = weights.iter().all(|w| *w > 0.0);
        let rule = CubatureRule {
            lattice,
            weights,
            omega,
            positive,
            construction,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn manifold(&self) -> Manifold {
        self.lattice.manifold()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest band the rule integrates exactly (0 when only constants are
    /// certified).
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn positive(&self) -> bool {
        self.positive
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Applies the rule to samples taken at the lattice nodes.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.weights.len() {
            return Err(Error::LengthMismatch {
                expected: self.weights.len(),
                got: samples.len(),
            });
        }
        Ok(samples
            .iter()
            .zip(&self.weights)
            .map(|(f, w)| f * w)
            .sum())
    }

    /// Largest defect `|Σ_k w_k u_j(x_k) - ∫u_j|` over the eigenbasis of
    /// `E_omega`.
    pub fn exactness_residual(&self) -> f64 {
        let manifold = self.manifold();
        let modes = manifold.eigen_basis(self.omega);
        let points = self.lattice.points();
        let mut worst = 0.0f64;
        for (j, mode) in modes.iter().enumerate() {
            let q: f64 = points
                .iter()
                .zip(&self.weights)
                .map(|(p, w)| mode.eval(p) * w)
                .sum();
            let exact = if j == 0 { manifold.volume().sqrt() } else { 0.0 };
            worst = worst.max((q - exact).abs());
        }
        worst
    }

    fn validate(&self) -> Result<()> {
        if self.weights.len() != self.lattice.len() {
            return Err(Error::LengthMismatch {
                expected: self.lattice.len(),
                got: self.weights.len(),
            });
        }
        if !self.omega.is_finite() || self.omega < 0.0 {
            return Err(Error::InvalidArtifact(format!(
                "exactness level must be finite and nonnegative, got {}",
                self.omega
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArtifact("non-finite weight".into()));
        }
        if self.positive {
            let min = self.weights.iter().cloned().fold(f64::INFINITY, f64::min);
            if min <= 0.0 {
                return Err(Error::InvalidArtifact(format!(
                    "rule marked positive but min weight is {min}"
                )));
            }
        }
        let residual = self.exactness_residual();
        let tol = EXACTNESS_TOL * self.manifold().volume().max(1.0);
        if residual > tol {
            return Err(Error::InvalidArtifact(format!(
                "exactness residual {residual:.3e} exceeds {tol:.3e} at omega {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// Compares the cubature defect on `f` against the modulus-of-continuity
    /// bound of order `m` after `k` Laplacian liftings. Requires `m > k ≥ 1`
    /// and a rule with genuine exactness (`omega > 0`).
    pub fn error_report(&self, f: &SpectralFunction, k: u32, m: u32) -> Result<ErrorReport> {
        if f.manifold() != self.manifold() {
            return Err(Error::InvalidParameter(
                "integrand lives on a different manifold".into(),
            ));
        }
        if k == 0 || m <= k {
            return Err(Error::InvalidParameter(format!(
                "error report needs m > k >= 1, got k={k} m={m}"
            )));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParameter(
                "error report needs a rule with positive exactness level".into(),
            ));
        }
        let exact = f.coefficients()[0] * self.manifold().volume().sqrt();
        let projected = f.project(self.omega);
        let q_proj = self.integrate(&projected.synthesize(self.lattice.points()))?;
        let q_direct = self.integrate(&f.synthesize(self.lattice.points()))?;
        let lhs = (exact - q_proj).abs();
        let lhs_direct = (exact - q_direct).abs();

        let lifted = f.laplacian_power(k as f64);
        let s = 1.0 / self.omega;
        let modulus = lifted.modulus_of_continuity(m - k, s, 256);
        let rhs = modulus / self.omega.powi(k as i32);
        let safe = |x: f64| if rhs > 0.0 { x / rhs } else { 0.0 };
        Ok(ErrorReport {
            lhs,
            lhs_direct,
            rhs,
            ratio: safe(lhs),
            ratio_direct: safe(lhs_direct),
        })
    }
}
