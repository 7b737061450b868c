//! Variational splines: interpolants that minimize `‖𝓛^k s‖²` inside a large
//! truncated band, their Lagrangian basis, the quadrature weights they
//! induce, and error-decay tables in the smoothing order.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cubature::{Construction, CubatureRule};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::manifold::Manifold;
use crate::spectral::SpectralFunction;

const SIDECAR_MAGIC: &[u8; 4] = b"SPLM";
const SIDECAR_VERSION: u32 = 1;

/// Truncation must leave this much headroom over the node count.
const TRUNCATION_HEADROOM: usize = 3;

/// `ρ√ω` threshold under which the spline cubature bound contracts and the
/// decay table is expected to be monotone.
pub const CONTRACTION_THRESHOLD: f64 = 0.5;

/// Lagrangian spline basis on a lattice: column γ of `coefficients` expands
/// `L_γ` (the minimizer of `‖𝓛^k s‖²` with `s(x_μ) = δ_γμ`) in the
/// eigenbasis of the truncation band `E_cutoff`.
#[derive(Clone, Debug)]
pub struct SplineModel {
    lattice: Lattice,
    k: u32,
    cutoff: f64,
    coefficients: DMatrix<f64>,
}

/// One row of a spline error-decay table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayRow {
    pub k: u32,
    /// `|∫f - Σ_γ w_γ f(x_γ)|` for the order-k spline weights.
    pub err: f64,
    /// Shape of the Sobolev-side bound, `ρ^k·‖𝓛^{k/2}f‖` (constant-free).
    pub sobolev_side: f64,
    /// Shape of the point-wise bound, `Vol·(ρ√ω)^k·‖f‖` (constant-free).
    pub pointwise_side: f64,
}

/// Error-decay table across smoothing orders, with the contraction regime
/// flagged: outside it no monotone decay is promised.
#[derive(Clone, Debug, Serialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    pub rho_sqrt_omega: f64,
    pub contracting: bool,
}

#[derive(Serialize, Deserialize)]
struct SplineRepr {
    lattice: Lattice,
    k: u32,
    cutoff: f64,
    matrix: String,
}

impl SplineModel {
    /// Solves the K interpolation problems `L_γ(x_μ) = δ_γμ` jointly through
    /// the stationarity system of the penalized objective.
    pub fn lagrangian_basis(lattice: &Lattice, k: u32, cutoff: f64) -> Result<SplineModel> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "spline smoothing order must be at least 1".into(),
            ));
        }
        if !cutoff.is_finite() || cutoff <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "truncation cutoff must be positive, got {cutoff}"
            )));
        }
        let manifold = lattice.manifold();
        let modes = manifold.eigen_basis(cutoff);
        let dim = modes.len();
        let nodes = lattice.len();
        if dim < TRUNCATION_HEADROOM * nodes {
            return Err(Error::TruncationTooSmall { rank: dim, nodes });
        }

        // Evaluation matrix: a[γ][j] = u_j(x_γ).
        let a = DMatrix::from_fn(nodes, dim, |g, j| modes[j].eval(&lattice.points()[g]));
        let rank = {
            let svd = a.clone().svd(false, false);
            let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
            svd.singular_values
                .iter()
                .filter(|s| **s > 1e-12 * smax)
                .count()
        };
        if rank < nodes {
            return Err(Error::TruncationTooSmall { rank, nodes });
        }

        // Penalty diagonal λ_j^{2k}, scaled to unit maximum; scaling the
        // objective leaves the minimizer unchanged but keeps the saddle
        // system well ranged.
        let lambda_max = modes
            .iter()
            .map(|m| m.eigenvalue())
            .fold(0.0f64, f64::max);
        let penalty: Vec<f64> = modes
            .iter()
            .map(|m| (m.eigenvalue() / lambda_max).powi(2 * k as i32))
            .collect();

        // Stationarity of ½cᵀDc + μᵀ(Ac - e): [D Aᵀ; A 0]·[c; μ] = [0; e].
        let size = dim + nodes;
        let mut saddle = DMatrix::zeros(size, size);
        for j in 0..dim {
            saddle[(j, j)] = penalty[j];
        }
        for g in 0..nodes {
            for j in 0..dim {
                saddle[(dim + g, j)] = a[(g, j)];
                saddle[(j, dim + g)] = a[(g, j)];
            }
        }
        let mut rhs = DMatrix::zeros(size, nodes);
        for g in 0..nodes {
            rhs[(dim + g, g)] = 1.0;
        }

        let lu = saddle.clone().full_piv_lu();
        let mut solution = lu
            .solve(&rhs)
            .ok_or(Error::TruncationTooSmall { rank, nodes })?;
        // One round of iterative refinement sharpens the interpolation
        // conditions, which downstream quadrature relies on.
        let residual = &rhs - &saddle * &solution;
        if let Some(correction) = lu.solve(&residual) {
            solution += correction;
        }

        let coefficients = solution.rows(0, dim).into_owned();
        Ok(SplineModel {
            lattice: lattice.clone(),
            k,
            cutoff,
            coefficients,
        })
    }

    /// A truncation level adequate for this lattice: at least `100·ρ^{-2}`
    /// and wide enough to hold three basis functions per node.
    pub fn recommended_cutoff(lattice: &Lattice) -> f64 {
        let rho = lattice.rho();
        let mut cutoff = (100.0 / (rho * rho)).max(16.0);
        let manifold = lattice.manifold();
        while manifold.band_dimension(cutoff) < TRUNCATION_HEADROOM * lattice.len() {
            cutoff *= 2.0;
        }
        cutoff
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn manifold(&self) -> Manifold {
        self.lattice.manifold()
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Band-dimension by node-count matrix of Lagrangian coefficients.
    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    /// Worst deviation of `L_γ(x_μ)` from `δ_γμ`.
    pub fn interpolation_residual(&self) -> f64 {
        let modes = self.manifold().eigen_basis(self.cutoff);
        let points = self.lattice.points();
        let mut worst = 0.0f64;
        for (g, p) in points.iter().enumerate() {
            let row: Vec<f64> = modes.iter().map(|m| m.eval(p)).collect();
            for mu in 0..points.len() {
                let val: f64 = (0..modes.len())
                    .map(|j| row[j] * self.coefficients[(j, mu)])
                    .sum();
                let target = if g == mu { 1.0 } else { 0.0 };
                worst = worst.max((val - target).abs());
            }
        }
        worst
    }

    /// The spline through the given node values, as a band-limited function
    /// in the truncation band.
    pub fn interpolate(&self, samples: &[f64]) -> Result<SpectralFunction> {
        if samples.len() != self.lattice.len() {
            return Err(Error::LengthMismatch {
                expected: self.lattice.len(),
                got: samples.len(),
            });
        }
        let c = &self.coefficients * DVector::from_column_slice(samples);
        SpectralFunction::new(self.manifold(), self.cutoff, c.iter().cloned().collect())
    }

    /// Quadrature weights `w_γ = ∫L_γ`; the rule is exact on the spline span
    /// by construction, and certified here on constants only.
    pub fn weights(&self) -> Result<CubatureRule> {
        let scale = self.manifold().volume().sqrt();
        let weights: Vec<f64> = (0..self.lattice.len())
            .map(|g| self.coefficients[(0, g)] * scale)
            .collect();
        CubatureRule::from_parts(
            self.lattice.clone(),
            weights,
            0.0,
            Construction::Spline,
        )
    }

    /// Spline cubature error on `f` for each smoothing order in `ks`,
    /// together with the constant-free shapes of the two bounds that control
    /// it. Monotone decay is only promised in the contraction regime.
    pub fn error_decay(
        lattice: &Lattice,
        f: &SpectralFunction,
        ks: &[u32],
        cutoff: f64,
    ) -> Result<DecayTable> {
        if f.manifold() != lattice.manifold() {
            return Err(Error::InvalidParameter(
                "integrand lives on a different manifold".into(),
            ));
        }
        let manifold = lattice.manifold();
        let exact = f.coefficients()[0] * manifold.volume().sqrt();
        let samples = f.synthesize(lattice.points());
        let rho = lattice.rho();
        let omega = f.cutoff();
        let mut rows = Vec::with_capacity(ks.len());
        for &k in ks {
            let model = SplineModel::lagrangian_basis(lattice, k, cutoff)?;
            let rule = model.weights()?;
            let err = (exact - rule.integrate(&samples)?).abs();
            rows.push(DecayRow {
                k,
                err,
                sobolev_side: rho.powi(k as i32) * f.sobolev_seminorm(k as f64 / 2.0),
                pointwise_side: manifold.volume()
                    * (rho * omega.sqrt()).powi(k as i32)
                    * f.norm(),
            });
        }
        let rho_sqrt_omega = rho * omega.sqrt();
        Ok(DecayTable {
            rows,
            rho_sqrt_omega,
            contracting: rho_sqrt_omega <= CONTRACTION_THRESHOLD,
        })
    }

    /// Writes the model as a JSON descriptor plus a binary `.splm` sidecar
    /// holding the coefficient matrix.
    pub fn save(&self, json_path: &Path) -> Result<()> {
        let sidecar_name = json_path
            .file_stem()
            .map(|s| format!("{}.splm", s.to_string_lossy()))
            .ok_or_else(|| Error::InvalidParameter("model path has no file name".into()))?;
        let repr = SplineRepr {
            lattice: self.lattice.clone(),
            k: self.k,
            cutoff: self.cutoff,
            matrix: sidecar_name.clone(),
        };
        let mut json = serde_json::to_string_pretty(&repr)?;
        json.push('\n');
        fs::write(json_path, json)?;

        let rows = self.coefficients.nrows();
        let cols = self.coefficients.ncols();
        let mut bytes = Vec::with_capacity(16 + rows * cols * 8);
        bytes.extend_from_slice(SIDECAR_MAGIC);
        bytes.extend_from_slice(&SIDECAR_VERSION.to_le_bytes());
        bytes.extend_from_slice(&(rows as u32).to_le_bytes());
        bytes.extend_from_slice(&(cols as u32).to_le_bytes());
        for i in 0..rows {
            for j in 0..cols {
                bytes.extend_from_slice(&self.coefficients[(i, j)].to_le_bytes());
            }
        }
        let sidecar_path = json_path.with_file_name(sidecar_name);
        fs::write(sidecar_path, bytes)?;
        Ok(())
    }

    pub fn load(json_path: &Path) -> Result<SplineModel> {
        let repr: SplineRepr = serde_json::from_str(&fs::read_to_string(json_path)?)?;
        if repr.k == 0 {
            return Err(Error::InvalidArtifact("spline order 0".into()));
        }
        let sidecar_path = json_path.with_file_name(&repr.matrix);
        let bytes = fs::read(&sidecar_path)?;
        if bytes.len() < 16 || &bytes[0..4] != SIDECAR_MAGIC {
            return Err(Error::InvalidArtifact(
                "coefficient sidecar is missing its header".into(),
            ));
        }
        let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
        if word(4) != SIDECAR_VERSION {
            return Err(Error::InvalidArtifact(format!(
                "unsupported sidecar version {}",
                word(4)
            )));
        }
        let rows = word(8) as usize;
        let cols = word(12) as usize;
        let manifold = repr.lattice.manifold();
        if rows != manifold.band_dimension(repr.cutoff) || cols != repr.lattice.len() {
            return Err(Error::InvalidArtifact(format!(
                "sidecar shape {rows}x{cols} does not match cutoff {} and {} nodes",
                repr.cutoff,
                repr.lattice.len()
            )));
        }
        if bytes.len() != 16 + rows * cols * 8 {
            return Err(Error::InvalidArtifact(format!(
                "sidecar holds {} bytes, expected {}",
                bytes.len(),
                16 + rows * cols * 8
            )));
        }
        let mut coefficients = DMatrix::zeros(rows, cols);
        let mut at = 16;
        for i in 0..rows {
            for j in 0..cols {
                coefficients[(i, j)] =
                    f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
                at += 8;
            }
        }
        let model = SplineModel {
            lattice: repr.lattice,
            k: repr.k,
            cutoff: repr.cutoff,
            coefficients,
        };
        let residual = model.interpolation_residual();
        if residual > 1e-6 {
            return Err(Error::InvalidArtifact(format!(
                "loaded coefficients interpolate with residual {residual:.3e}"
            )));
        }
        Ok(model)
    }
}
