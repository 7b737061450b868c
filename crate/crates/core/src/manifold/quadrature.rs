//! Reference product quadrature: composite trapezoid on periodic directions,
//! Gauss-Legendre in colatitude on the sphere.

use std::f64::consts::{PI, TAU};

use super::{Manifold, ManifoldKind, Point};

/// A fixed quadrature rule on a manifold: nodes with positive weights
/// summing to the volume.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn apply<F: Fn(&Point) -> f64>(&self, f: &F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub(super) fn build(m: Manifold, resolution: usize) -> Quadrature {
    assert!(resolution >= 2, "resolution must be at least 2");
    match m.kind() {
        ManifoldKind::Circle => {
            let w = TAU / resolution as f64;
            let points = (0..resolution)
                .map(|i| Point::circle(i as f64 * w))
                .collect();
            Quadrature {
                points,
                weights: vec![w; resolution],
            }
        }
        ManifoldKind::Torus2 => {
            let step = TAU / resolution as f64;
            let mut points = Vec::with_capacity(resolution * resolution);
            for i in 0..resolution {
                for j in 0..resolution {
                    points.push(Point::torus(i as f64 * step, j as f64 * step));
                }
            }
            Quadrature {
                weights: vec![step * step; points.len()],
                points,
            }
        }
        ManifoldKind::Sphere2 => {
            let (nodes, gl_weights) = gauss_legendre(resolution);
            let n_lon = 2 * resolution;
            let lon_w = TAU / n_lon as f64;
            let mut points = Vec::with_capacity(resolution * n_lon);
            let mut weights = Vec::with_capacity(resolution * n_lon);
            for (x, gw) in nodes.iter().zip(&gl_weights) {
                let colat = x.clamp(-1.0, 1.0).acos();
                for j in 0..n_lon {
                    points.push(Point::sphere(colat, j as f64 * lon_w));
                    weights.push(gw * lon_w);
                }
            }
            Quadrature { points, weights }
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence, with the classical cosine initial guesses.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_small_orders_match_tables() {
        let (x, w) = gauss_legendre(2);
        let r = 1.0 / 3.0f64.sqrt();
        assert_abs_diff_eq!(x[0], -r, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], r, epsilon = 1e-15);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-15);

        let (x, w) = gauss_legendre(3);
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 8.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[0], 5.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            for degree in 0..(2 * n) {
                let quad: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * xi.powi(degree as i32))
                    .sum();
                let exact = if degree % 2 == 0 {
                    2.0 / (degree as f64 + 1.0)
                } else {
                    0.0
                };
                assert!(
                    (quad - exact).abs() < 1e-13,
                    "n = {n}, degree = {degree}: {quad} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn weights_sum_to_volume() {
        for m in [Manifold::circle(), Manifold::torus(), Manifold::sphere()] {
            for resolution in [2usize, 7, 16, 33] {
                let q = m.quadrature(resolution);
                let total: f64 = q.weights.iter().sum();
                assert_abs_diff_eq!(total, m.volume(), epsilon = 1e-11);
                assert!(q.weights.iter().all(|w| *w > 0.0));
            }
        }
    }
}
