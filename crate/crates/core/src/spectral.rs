//! Band-limited functions as real eigenbasis coefficient vectors, with
//! synthesis, analysis against the reference oracle, Bernstein-inequality
//! ratios, projection tails, and the spectral modulus of continuity.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{Manifold, Mode, Point};

/// An element of `E_Λ`: the span of eigenfunctions with eigenvalue at most
/// the cutoff. Coefficients are aligned with
/// [`Manifold::eigen_basis`]`(cutoff)`, and the L2 norm is the euclidean norm
/// of the coefficients (Plancherel).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralRepr", into = "SpectralRepr")]
pub struct SpectralFunction {
    manifold: Manifold,
    cutoff: f64,
    coefficients: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpectralRepr {
    manifold: Manifold,
    cutoff: f64,
    coefficients: Vec<f64>,
}

impl From<SpectralFunction> for SpectralRepr {
    fn from(f: SpectralFunction) -> Self {
        SpectralRepr {
            manifold: f.manifold,
            cutoff: f.cutoff,
            coefficients: f.coefficients,
        }
    }
}

impl TryFrom<SpectralRepr> for SpectralFunction {
    type Error = Error;

    fn try_from(r: SpectralRepr) -> Result<Self> {
        SpectralFunction::new(r.manifold, r.cutoff, r.coefficients)
    }
}

impl SpectralFunction {
    /// Wraps a coefficient vector, checking that its length matches the
    /// eigenbasis of the stated cutoff.
    pub fn new(manifold: Manifold, cutoff: f64, coefficients: Vec<f64>) -> Result<Self> {
        if !(cutoff >= 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidArtifact(format!(
                "cutoff must be finite and nonnegative, got {cutoff}"
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArtifact(
                "coefficients must be finite".into(),
            ));
        }
        let expected = manifold.band_dimension(cutoff);
        if coefficients.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: coefficients.len(),
            });
        }
        Ok(SpectralFunction {
            manifold,
            cutoff,
            coefficients,
        })
    }

    /// The zero function in `E_cutoff`.
    pub fn zero(manifold: Manifold, cutoff: f64) -> Self {
        let dim = manifold.band_dimension(cutoff);
        SpectralFunction {
            manifold,
            cutoff,
            coefficients: vec![0.0; dim],
        }
    }

    /// A random unit-norm element of `E_cutoff` with coefficients drawn
    /// uniformly from [-1, 1] before normalization.
    pub fn random<R: Rng + ?Sized>(manifold: Manifold, cutoff: f64, rng: &mut R) -> Self {
        let dim = manifold.band_dimension(cutoff);
        let mut coefficients: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            for c in &mut coefficients {
                *c /= norm;
            }
        }
        SpectralFunction {
            manifold,
            cutoff,
            coefficients,
        }
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn modes(&self) -> Vec<Mode> {
        self.manifold.eigen_basis(self.cutoff)
    }

    /// L2 norm via Plancherel.
    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Value at a single point.
    pub fn eval(&self, p: &Point) -> f64 {
        self.modes()
            .iter()
            .zip(&self.coefficients)
            .map(|(u, c)| c * u.eval(p))
            .sum()
    }

    /// Values at many points, evaluating the eigenbasis once.
    pub fn synthesize(&self, points: &[Point]) -> Vec<f64> {
        let modes = self.modes();
        points
            .iter()
            .map(|p| {
                modes
                    .iter()
                    .zip(&self.coefficients)
                    .map(|(u, c)| c * u.eval(p))
                    .sum()
            })
            .collect()
    }

    /// Orthogonal projection onto `E_omega` for `omega ≤ cutoff`; since the
    /// basis is ordered by eigenvalue, this truncates the coefficients.
    pub fn project(&self, omega: f64) -> SpectralFunction {
        assert!(omega >= 0.0);
        let dim = self.manifold.band_dimension(omega.min(self.cutoff));
        SpectralFunction {
            manifold: self.manifold,
            cutoff: omega.min(self.cutoff),
            coefficients: self.coefficients[..dim].to_vec(),
        }
    }

    /// `‖f - f_omega‖`, the norm of the spectrum above `omega`.
    pub fn projection_tail(&self, omega: f64) -> f64 {
        let dim = self.manifold.band_dimension(omega.min(self.cutoff));
        self.coefficients[dim..].iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Applies `𝓛^s` spectrally: multiplies each coefficient by `λ_j^s`.
    pub fn laplacian_power(&self, s: f64) -> SpectralFunction {
        let modes = self.modes();
        let coefficients = modes
            .iter()
            .zip(&self.coefficients)
            .map(|(u, c)| {
                let lam = u.eigenvalue();
                if lam == 0.0 && s > 0.0 {
                    0.0
                } else {
                    c * lam.powf(s)
                }
            })
            .collect();
        SpectralFunction {
            manifold: self.manifold,
            cutoff: self.cutoff,
            coefficients,
        }
    }

    /// `‖𝓛^s f‖ = (Σ λ_j^{2s} c_j²)^{1/2}` without materializing the scaled
    /// function.
    pub fn sobolev_seminorm(&self, s: f64) -> f64 {
        self.modes()
            .iter()
            .zip(&self.coefficients)
            .map(|(u, c)| {
                let lam = u.eigenvalue();
                if lam == 0.0 && s > 0.0 {
                    0.0
                } else {
                    (c * lam.powf(s)).powi(2)
                }
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Checks the Bernstein inequality `‖𝓛^s f‖ ≤ ω^s ‖f‖` for `f ∈ E_ω`.
    pub fn bernstein_check(&self, omega: f64, s: f64) -> Result<BernsteinReport> {
        let modes = self.modes();
        for (u, c) in modes.iter().zip(&self.coefficients) {
            if u.eigenvalue() > omega && *c != 0.0 {
                return Err(Error::CutoffExceeded { omega });
            }
        }
        let lhs = self.sobolev_seminorm(s);
        let bound = omega.powf(s) * self.norm();
        let ratio = if bound == 0.0 { 0.0 } else { lhs / bound };
        Ok(BernsteinReport { lhs, bound, ratio })
    }

    /// Modulus of continuity `Ω_r(f, s) = sup_{|τ| ≤ s} ‖Δ_τ^r f‖` where the
    /// difference operator acts spectrally with multiplier magnitude
    /// `|e^{iτλ_j} - 1| = 2|sin(τλ_j/2)|`.
    ///
    /// The sup is realized as a max over a uniform τ grid (the multiplier is
    /// even in τ, so only `[0, s]` is scanned) augmented with the stationary
    /// points `τλ = π (mod 2π)` of the dominant mode.
    pub fn modulus_of_continuity(&self, r: u32, s: f64, tau_grid: usize) -> f64 {
        assert!(r >= 1, "difference order must be at least 1");
        assert!(s > 0.0, "span must be positive");
        assert!(tau_grid >= 64, "tau grid too coarse");
        let modes = self.modes();
        let norm_sq_at = |tau: f64| -> f64 {
            modes
                .iter()
                .zip(&self.coefficients)
                .map(|(u, c)| {
                    let mult = 2.0 * (tau * u.eigenvalue() / 2.0).sin().abs();
                    mult.powi(2 * r as i32) * c * c
                })
                .sum()
        };
        let mut best = 0.0f64;
        for i in 0..=tau_grid {
            best = best.max(norm_sq_at(s * i as f64 / tau_grid as f64));
        }
        // Stationary points of the dominant mode's multiplier.
        let dominant = modes
            .iter()
            .zip(&self.coefficients)
            .filter(|(u, _)| u.eigenvalue() > 0.0)
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(u, _)| u.eigenvalue());
        if let Some(lam) = dominant {
            let mut k = 0u32;
            loop {
                let tau = (2.0 * k as f64 + 1.0) * std::f64::consts::PI / lam;
                if tau > s || k >= 64 {
                    break;
                }
                best = best.max(norm_sq_at(tau));
                k += 1;
            }
        }
        best.sqrt()
    }
}

/// Both sides of the Bernstein inequality and their quotient.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BernsteinReport {
    /// `‖𝓛^s f‖`.
    pub lhs: f64,
    /// `ω^s ‖f‖`.
    pub bound: f64,
    /// `lhs / bound`; at most 1 for genuine elements of `E_ω`.
    pub ratio: f64,
}

/// Expands an arbitrary evaluator against the eigenbasis: `c_j = ∫ f·u_j`
/// under the reference quadrature at the given resolution.
pub fn analyze<F: Fn(&Point) -> f64>(
    m: &Manifold,
    f: F,
    cutoff: f64,
    resolution: usize,
) -> SpectralFunction {
    let modes = m.eigen_basis(cutoff);
    let quad = m.quadrature(resolution);
    let values: Vec<f64> = quad.points.iter().map(&f).collect();
    let coefficients = modes
        .iter()
        .map(|u| {
            quad.points
                .iter()
                .zip(&quad.weights)
                .zip(&values)
                .map(|((p, w), v)| w * v * u.eval(p))
                .sum()
        })
        .collect();
    SpectralFunction {
        manifold: *m,
        cutoff,
        coefficients,
    }
}
