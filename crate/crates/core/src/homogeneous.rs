//! Products of band-limited functions, the exact discrete Fourier transform
//! they make possible, and the invariant-derivative identities available on
//! the group manifolds.
//!
//! On the three supported manifolds a product of two functions from `E_ω`
//! stays band limited, with spectrum inside `E_{4dω}` where d is the
//! symmetry-group dimension. A cubature rule exact at that level therefore
//! turns sampling into an exact Fourier transform on `E_ω`.

use std::collections::HashMap;

use serde::Serialize;

use crate::cubature::CubatureRule;
use crate::error::{Error, Result};
use crate::manifold::{CircleMode, Manifold, Mode};
use crate::spectral::{analyze, SpectralFunction};

/// Spectral safety factor: products from `E_ω` live in `E_{bound}` with
/// `bound = 4·group_dim·ω`.
pub fn product_bound(manifold: Manifold, omega: f64) -> f64 {
    4.0 * manifold.group_dim() as f64 * omega
}

/// Expands the point-wise product `f·g` in the eigenbasis of `E_cutoff`,
/// using a reference quadrature exact for the full trigonometric degree of
/// the integrands.
pub fn product_coefficients(
    f: &SpectralFunction,
    g: &SpectralFunction,
    cutoff: f64,
) -> Result<SpectralFunction> {
    if f.manifold() != g.manifold() {
        return Err(Error::InvalidParameter(
            "product factors live on different manifolds".into(),
        ));
    }
    let manifold = f.manifold();
    let degree_sum = manifold.max_degree(f.cutoff())
        + manifold.max_degree(g.cutoff())
        + manifold.max_degree(cutoff);
    let resolution = manifold.exact_resolution(degree_sum);
    Ok(analyze(
        &manifold,
        |p| f.eval(p) * g.eval(p),
        cutoff,
        resolution,
    ))
}

/// Measured spectral support of a product against its guaranteed bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProductReport {
    /// Common band of the factors, `max(ω_f, ω_g)`.
    pub omega: f64,
    /// Guaranteed band of the product, `4·group_dim·omega`.
    pub bound: f64,
    /// Largest relative coefficient found above the bound.
    pub max_leakage: f64,
    /// Largest eigenvalue carrying a coefficient above `1e-10` relative.
    pub empirical_cutoff: f64,
}

/// Expands `f·g` well beyond the guaranteed band and reports how much
/// spectrum actually leaks past it. `probe_cutoff` must exceed the bound by
/// half again so leakage would be visible.
pub fn product_bandlimit_check(
    f: &SpectralFunction,
    g: &SpectralFunction,
    probe_cutoff: f64,
) -> Result<ProductReport> {
    let omega = f.cutoff().max(g.cutoff());
    let bound = product_bound(f.manifold(), omega);
    if probe_cutoff < 1.5 * bound {
        return Err(Error::InvalidParameter(format!(
            "probe cutoff {probe_cutoff} is too close to the product bound {bound}; \
             use at least 1.5x"
        )));
    }
    let product = product_coefficients(f, g, probe_cutoff)?;
    let norm = product.norm();
    let modes = f.manifold().eigen_basis(probe_cutoff);
    let mut max_leakage = 0.0f64;
    let mut empirical_cutoff = 0.0f64;
    for (mode, c) in modes.iter().zip(product.coefficients()) {
        let rel = if norm > 0.0 { c.abs() / norm } else { 0.0 };
        if mode.eigenvalue() > bound {
            max_leakage = max_leakage.max(rel);
        }
        if rel > 1e-10 {
            empirical_cutoff = empirical_cutoff.max(mode.eigenvalue());
        }
    }
    Ok(ProductReport {
        omega,
        bound,
        max_leakage,
        empirical_cutoff,
    })
}

/// Exact discrete Fourier transform: recovers the coefficients of `f ∈ E_ω`
/// from its samples at the rule's nodes, `c_j = Σ_k f(x_k)·u_j(x_k)·w_k`.
/// The rule must be exact on the product band `E_{4dω}`.
pub fn discrete_fourier_transform(
    rule: &CubatureRule,
    samples: &[f64],
    omega: f64,
) -> Result<SpectralFunction> {
    let manifold = rule.manifold();
    let need = product_bound(manifold, omega);
    if rule.omega() < need {
        return Err(Error::InsufficientExactness {
            have: rule.omega(),
            need,
        });
    }
    if samples.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            got: samples.len(),
        });
    }
    let modes = manifold.eigen_basis(omega);
    let points = rule.lattice().points();
    let coefficients: Vec<f64> = modes
        .iter()
        .map(|mode| {
            points
                .iter()
                .zip(samples)
                .zip(rule.weights())
                .map(|((p, s), w)| s * mode.eval(p) * w)
                .sum()
        })
        .collect();
    SpectralFunction::new(manifold, omega, coefficients)
}

fn derivative_factor(factor: CircleMode) -> Option<(f64, CircleMode)> {
    match factor {
        CircleMode::Const => None,
        CircleMode::Cos(m) => Some((-(m as f64), CircleMode::Sin(m))),
        CircleMode::Sin(m) => Some((m as f64, CircleMode::Cos(m))),
    }
}

/// Differentiates along the invariant coordinate field of the given axis
/// (0 on the circle; 0 or 1 on the torus). Band limits are preserved.
pub fn spectral_derivative(f: &SpectralFunction, axis: usize) -> Result<SpectralFunction> {
    let manifold = f.manifold();
    if axis >= manifold.group_dim() || manifold.group_dim() > 2 {
        return Err(Error::UnsupportedManifold(manifold.kind()));
    }
    let modes = manifold.eigen_basis(f.cutoff());
    let index: HashMap<Mode, usize> = modes
        .iter()
        .enumerate()
        .map(|(i, m)| (*m, i))
        .collect();
    let mut out = vec![0.0; modes.len()];
    for (mode, c) in modes.iter().zip(f.coefficients()) {
        if *c == 0.0 {
            continue;
        }
        let mapped = match (*mode, axis) {
            (Mode::Circle(a), 0) => derivative_factor(a).map(|(s, b)| (s, Mode::Circle(b))),
            (Mode::Torus(a, b), 0) => {
                derivative_factor(a).map(|(s, a2)| (s, Mode::Torus(a2, b)))
            }
            (Mode::Torus(a, b), 1) => {
                derivative_factor(b).map(|(s, b2)| (s, Mode::Torus(a, b2)))
            }
            _ => return Err(Error::UnsupportedManifold(manifold.kind())),
        };
        if let Some((scale, target)) = mapped {
            let j = *index
                .get(&target)
                .expect("derivative stays inside the eigenlevel");
            out[j] += scale * c;
        }
    }
    SpectralFunction::new(manifold, f.cutoff(), out)
}

/// Checks `Σ_{i_1..i_s} ‖D_{i_1}···D_{i_s} f‖² = ‖𝓛^{s/2} f‖²` by applying
/// the invariant derivatives explicitly on one side and weighting
/// coefficients by `λ^s` on the other. Returns the relative residual.
pub fn derivative_identity_check(f: &SpectralFunction, s: u32) -> Result<f64> {
    let manifold = f.manifold();
    if manifold.group_dim() > 2 {
        return Err(Error::UnsupportedManifold(manifold.kind()));
    }
    if s == 0 {
        return Err(Error::InvalidParameter(
            "derivative identity needs s >= 1".into(),
        ));
    }
    let axes = manifold.group_dim();
    let mut stack = vec![f.clone()];
    for _ in 0..s {
        let mut next = Vec::with_capacity(stack.len() * axes);
        for g in &stack {
            for axis in 0..axes {
                next.push(spectral_derivative(g, axis)?);
            }
        }
        stack = next;
    }
    let lhs: f64 = stack.iter().map(|g| g.norm().powi(2)).sum();
    let rhs: f64 = f
        .manifold()
        .eigen_basis(f.cutoff())
        .iter()
        .zip(f.coefficients())
        .map(|(m, c)| m.eigenvalue().powi(s as i32) * c * c)
        .sum();
    let scale = rhs.abs().max(1e-30);
    Ok((lhs - rhs).abs() / scale)
}
