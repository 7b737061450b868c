//! Sampling frames on `E_ω`: the matrix of eigenfunction values at lattice
//! nodes, empirical Plancherel-Polya bounds from its singular values, the
//! dual frame that inverts sampling, and exact reconstruction.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::manifold::Manifold;
use crate::spectral::SpectralFunction;

/// Relative singular-value floor deciding rank; below it the node set is
/// declared not a frame.
pub(crate) const RANK_FLOOR: f64 = 1e-12;

/// The matrix `U[j][k] = u_j(x_k)` linking coefficients in `E_ω` to node
/// samples: `samples = Uᵀ c`.
#[derive(Clone, Debug)]
pub struct SamplingMatrix {
    lattice: Lattice,
    omega: f64,
    matrix: DMatrix<f64>,
}

/// Empirical two-sided sampling constants: `A·Σf(x_k)² ≤ ‖f‖² ≤ B·Σf(x_k)²`
/// for every f in the band. `a = 0` (with infinite `b`) signals that the
/// nodes do not form a frame.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FrameBounds {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub condition: f64,
}

impl SamplingMatrix {
    /// Evaluates the eigenbasis of `E_omega` at every lattice node.
    pub fn build(lattice: &Lattice, omega: f64) -> SamplingMatrix {
        let manifold = lattice.manifold();
        let modes = manifold.eigen_basis(omega);
        let points = lattice.points();
        let matrix = DMatrix::from_fn(modes.len(), points.len(), |j, k| {
            modes[j].eval(&points[k])
        });
        SamplingMatrix {
            lattice: lattice.clone(),
            omega,
            matrix,
        }
    }

    pub fn manifold(&self) -> Manifold {
        self.lattice.manifold()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `dim E_ω` rows by node-count columns.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn band_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn node_count(&self) -> usize {
        self.matrix.ncols()
    }

    /// The vector of exact eigenfunction integrals `m_j = ∫ u_j`, which is
    /// `(√Vol, 0, …, 0)` by orthogonality to the constant.
    pub fn moment_vector(&self) -> DVector<f64> {
        let mut m = DVector::zeros(self.band_dim());
        m[0] = self.manifold().volume().sqrt();
        m
    }

    /// Frame constants from the extreme singular values of the sampling
    /// matrix: `A = 1/σ_max²`, `B = 1/σ_min²`.
    pub fn frame_bounds(&self) -> FrameBounds {
        let svd = self.matrix.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let smin = if self.matrix.ncols() < self.matrix.nrows() {
            0.0
        } else {
            svd.singular_values
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min)
        };
        if smax == 0.0 || smin <= RANK_FLOOR * smax {
            FrameBounds {
                a: 0.0,
                b: f64::INFINITY,
                condition: f64::INFINITY,
            }
        } else {
            let a = 1.0 / (smax * smax);
            let b = 1.0 / (smin * smin);
            FrameBounds {
                a,
                b,
                condition: b / a,
            }
        }
    }

    fn checked_svd(&self) -> Result<nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>> {
        let svd = self.matrix.clone().svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let rank = svd
            .singular_values
            .iter()
            .filter(|s| **s > RANK_FLOOR * smax)
            .count();
        if rank < self.band_dim() {
            return Err(Error::NotAFrame {
                omega: self.omega,
                rank,
                dim: self.band_dim(),
            });
        }
        Ok(svd)
    }

    /// The dual-frame coefficient matrix `Θ = (U·Uᵀ)^{-1}·U`; column k holds
    /// the coefficients of the dual element `Θ_k`, so `c = Θ·samples`
    /// inverts sampling on the whole band.
    pub fn dual_frame(&self) -> Result<DMatrix<f64>> {
        let svd = self.checked_svd()?;
        let u = svd.u.as_ref().expect("svd computed with u");
        let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
        let mut scaled = u.clone();
        for (j, s) in svd.singular_values.iter().enumerate() {
            let inv = 1.0 / s;
            for i in 0..scaled.nrows() {
                scaled[(i, j)] = u[(i, j)] * inv;
            }
        }
        Ok(scaled * v_t)
    }

    /// Minimal-norm solution of `U·w = rhs` via the pseudoinverse.
    pub(crate) fn min_norm_solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let svd = self.checked_svd()?;
        let u = svd.u.as_ref().expect("svd computed with u");
        let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
        let mut y = u.transpose() * rhs;
        for (j, s) in svd.singular_values.iter().enumerate() {
            y[j] /= s;
        }
        Ok(v_t.transpose() * y)
    }

    /// Orthonormal basis of the row space of the sampling matrix (rows span
    /// the sample-space image of the band); the projector onto that space is
    /// `basisᵀ·basis`.
    pub(crate) fn row_space_basis(&self) -> Result<DMatrix<f64>> {
        let svd = self.checked_svd()?;
        let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
        Ok(v_t.clone())
    }

    /// Recovers the band-limited function with the given node samples:
    /// `c = Θ·samples` (exact on `E_ω` when the nodes form a frame).
    pub fn reconstruct(&self, samples: &[f64]) -> Result<SpectralFunction> {
        if samples.len() != self.node_count() {
            return Err(Error::LengthMismatch {
                expected: self.node_count(),
                got: samples.len(),
            });
        }
        let theta = self.dual_frame()?;
        let c = theta * DVector::from_column_slice(samples);
        SpectralFunction::new(self.manifold(), self.omega, c.iter().cloned().collect())
    }
}
