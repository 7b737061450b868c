//! The three built-in compact manifolds: unit circle, flat square 2-torus,
//! unit 2-sphere. Each carries its Laplace-Beltrami eigenbasis in closed
//! form, the geodesic metric, closed-form metric ball volumes, and a
//! product-quadrature reference oracle used as ground truth by every other
//! module.

mod harmonics;
mod quadrature;

pub use quadrature::Quadrature;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which built-in manifold a value lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ManifoldKind {
    #[serde(rename = "circle")]
    Circle,
    #[serde(rename = "torus2")]
    Torus2,
    #[serde(rename = "sphere2")]
    Sphere2,
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ManifoldKind::Circle => "circle",
            ManifoldKind::Torus2 => "torus2",
            ManifoldKind::Sphere2 => "sphere2",
        };
        f.write_str(s)
    }
}

impl FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(ManifoldKind::Circle),
            "torus2" => Ok(ManifoldKind::Torus2),
            "sphere2" => Ok(ManifoldKind::Sphere2),
            other => Err(Error::InvalidArtifact(format!(
                "unknown manifold kind {other:?} (expected circle, torus2 or sphere2)"
            ))),
        }
    }
}

/// A concrete compact manifold. All geometric quantities (dimension, volume,
/// group dimension, diameter) are closed-form constants of the kind, so the
/// type is a thin copyable wrapper whose serialized descriptor spells the
/// constants out for consumers in other languages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Descriptor", into = "Descriptor")]
pub struct Manifold {
    kind: ManifoldKind,
}

/// Serialized form of [`Manifold`]; the redundant fields are validated on
/// load so a hand-edited descriptor cannot silently disagree with the kind.
#[derive(Serialize, Deserialize)]
struct Descriptor {
    kind: ManifoldKind,
    n: usize,
    volume: f64,
    group_dim: usize,
}

impl From<Manifold> for Descriptor {
    fn from(m: Manifold) -> Self {
        Descriptor {
            kind: m.kind,
            n: m.dim(),
            volume: m.volume(),
            group_dim: m.group_dim(),
        }
    }
}

impl TryFrom<Descriptor> for Manifold {
    type Error = Error;

    fn try_from(d: Descriptor) -> Result<Self> {
        let m = Manifold { kind: d.kind };
        if d.n != m.dim() {
            return Err(Error::InvalidArtifact(format!(
                "descriptor n = {} does not match {} (expected {})",
                d.n,
                m.kind,
                m.dim()
            )));
        }
        if d.volume != m.volume() {
            return Err(Error::InvalidArtifact(format!(
                "descriptor volume {} does not match {} (expected {})",
                d.volume,
                m.kind,
                m.volume()
            )));
        }
        if d.group_dim != m.group_dim() {
            return Err(Error::InvalidArtifact(format!(
                "descriptor group_dim = {} does not match {} (expected {})",
                d.group_dim,
                m.kind,
                m.group_dim()
            )));
        }
        Ok(m)
    }
}

/// A point in the canonical chart of its manifold.
///
/// Coordinates are kept normalized: angles in `[0, 2π)`, colatitude in
/// `[0, π]`, and pole points carry longitude 0 so equal points compare equal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Circle { theta: f64 },
    Torus { theta1: f64, theta2: f64 },
    Sphere { colat: f64, lon: f64 },
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t.is_finite() && t < TAU {
        t
    } else {
        0.0
    }
}

impl Point {
    pub fn circle(theta: f64) -> Point {
        Point::Circle {
            theta: wrap_angle(theta),
        }
    }

    pub fn torus(theta1: f64, theta2: f64) -> Point {
        Point::Torus {
            theta1: wrap_angle(theta1),
            theta2: wrap_angle(theta2),
        }
    }

    pub fn sphere(colat: f64, lon: f64) -> Point {
        let mut c = colat.rem_euclid(TAU);
        let mut l = lon;
        if c > PI {
            c = TAU - c;
            l += PI;
        }
        if c == 0.0 || c == PI {
            l = 0.0;
        }
        Point::Sphere {
            colat: c,
            lon: wrap_angle(l),
        }
    }

    /// Intrinsic coordinates in canonical order; this is the on-disk layout
    /// of lattice points.
    pub fn coords(&self) -> Vec<f64> {
        match *self {
            Point::Circle { theta } => vec![theta],
            Point::Torus { theta1, theta2 } => vec![theta1, theta2],
            Point::Sphere { colat, lon } => vec![colat, lon],
        }
    }

    pub fn kind(&self) -> ManifoldKind {
        match self {
            Point::Circle { .. } => ManifoldKind::Circle,
            Point::Torus { .. } => ManifoldKind::Torus2,
            Point::Sphere { .. } => ManifoldKind::Sphere2,
        }
    }

    /// Embedding of a sphere point in R^3; used for fast chordal distance
    /// comparisons.
    pub(crate) fn unit3(&self) -> [f64; 3] {
        match *self {
            Point::Sphere { colat, lon } => {
                let (sc, cc) = colat.sin_cos();
                let (sl, cl) = lon.sin_cos();
                [sc * cl, sc * sl, cc]
            }
            _ => panic!("unit3 is only defined for sphere points"),
        }
    }
}

/// One real orthonormal eigenfunction factor on a circle direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CircleMode {
    /// The constant `(2π)^{-1/2}`.
    Const,
    /// `cos(mθ)/√π`, `m ≥ 1`.
    Cos(u32),
    /// `sin(mθ)/√π`, `m ≥ 1`.
    Sin(u32),
}

impl CircleMode {
    fn frequency(&self) -> u32 {
        match *self {
            CircleMode::Const => 0,
            CircleMode::Cos(m) | CircleMode::Sin(m) => m,
        }
    }

    fn eval(&self, theta: f64) -> f64 {
        const INV_SQRT_TAU: f64 = 0.3989422804014327; // (2π)^{-1/2}
        const INV_SQRT_PI: f64 = 0.5641895835477563; // π^{-1/2}
        match *self {
            CircleMode::Const => INV_SQRT_TAU,
            CircleMode::Cos(m) => (m as f64 * theta).cos() * INV_SQRT_PI,
            CircleMode::Sin(m) => (m as f64 * theta).sin() * INV_SQRT_PI,
        }
    }

    /// Closed-form second derivative, for independent eigen-relation checks.
    fn second_derivative(&self, theta: f64) -> f64 {
        let m = self.frequency() as f64;
        -m * m * self.eval(theta)
    }
}

/// One real orthonormal Laplacian eigenfunction, identified structurally so
/// evaluation, eigenvalue and trigonometric degree are all closed-form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Circle(CircleMode),
    Torus(CircleMode, CircleMode),
    /// Real spherical harmonic of the given degree; order < 0 selects the
    /// sine harmonic, order > 0 the cosine harmonic.
    Sphere { degree: u32, order: i32 },
}

impl Mode {
    pub fn eigenvalue(&self) -> f64 {
        match *self {
            Mode::Circle(c) => {
                let m = c.frequency() as f64;
                m * m
            }
            Mode::Torus(c1, c2) => {
                let m1 = c1.frequency() as f64;
                let m2 = c2.frequency() as f64;
                m1 * m1 + m2 * m2
            }
            Mode::Sphere { degree, .. } => {
                let l = degree as f64;
                l * (l + 1.0)
            }
        }
    }

    /// Largest per-axis trigonometric frequency (circle, torus) or the
    /// harmonic degree (sphere); drives exact quadrature resolution choices.
    pub fn degree(&self) -> u32 {
        match *self {
            Mode::Circle(c) => c.frequency(),
            Mode::Torus(c1, c2) => c1.frequency().max(c2.frequency()),
            Mode::Sphere { degree, .. } => degree,
        }
    }

    pub fn eval(&self, p: &Point) -> f64 {
        match (*self, *p) {
            (Mode::Circle(c), Point::Circle { theta }) => c.eval(theta),
            (Mode::Torus(c1, c2), Point::Torus { theta1, theta2 }) => {
                c1.eval(theta1) * c2.eval(theta2)
            }
            (Mode::Sphere { degree, order }, Point::Sphere { colat, lon }) => {
                harmonics::real_harmonic(degree, order, colat, lon)
            }
            _ => panic!("mode and point belong to different manifolds"),
        }
    }
}

impl Manifold {
    pub fn circle() -> Manifold {
        Manifold {
            kind: ManifoldKind::Circle,
        }
    }

    pub fn torus() -> Manifold {
        Manifold {
            kind: ManifoldKind::Torus2,
        }
    }

    pub fn sphere() -> Manifold {
        Manifold {
            kind: ManifoldKind::Sphere2,
        }
    }

    pub fn new(kind: ManifoldKind) -> Manifold {
        Manifold { kind }
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    /// Intrinsic dimension n.
    pub fn dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Circle => 1,
            ManifoldKind::Torus2 | ManifoldKind::Sphere2 => 2,
        }
    }

    /// Dimension of the transitively acting group: U(1), T^2, SO(3).
    pub fn group_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Circle => 1,
            ManifoldKind::Torus2 => 2,
            ManifoldKind::Sphere2 => 3,
        }
    }

    pub fn volume(&self) -> f64 {
        match self.kind {
            ManifoldKind::Circle => TAU,
            ManifoldKind::Torus2 => TAU * TAU,
            ManifoldKind::Sphere2 => 2.0 * TAU,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self.kind {
            ManifoldKind::Circle | ManifoldKind::Sphere2 => PI,
            ManifoldKind::Torus2 => PI * std::f64::consts::SQRT_2,
        }
    }

    /// Builds a [`Point`] from raw chart coordinates, normalizing angles.
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArtifact(
                "point coordinates must be finite".into(),
            ));
        }
        match (self.kind, coords) {
            (ManifoldKind::Circle, [t]) => Ok(Point::circle(*t)),
            (ManifoldKind::Torus2, [t1, t2]) => Ok(Point::torus(*t1, *t2)),
            (ManifoldKind::Sphere2, [c, l]) => Ok(Point::sphere(*c, *l)),
            _ => Err(Error::LengthMismatch {
                expected: self.dim(),
                got: coords.len(),
            }),
        }
    }

    /// Geodesic distance between two points of this manifold.
    ///
    /// Wrapped arc distance on the circle, per-axis wrapped differences
    /// combined in l2 on the torus, great-circle distance on the sphere.
    pub fn distance(&self, p: &Point, q: &Point) -> f64 {
        match (*p, *q) {
            (Point::Circle { theta: a }, Point::Circle { theta: b }) => arc(a, b),
            (
                Point::Torus {
                    theta1: a1,
                    theta2: a2,
                },
                Point::Torus {
                    theta1: b1,
                    theta2: b2,
                },
            ) => {
                let d1 = arc(a1, b1);
                let d2 = arc(a2, b2);
                d1.hypot(d2)
            }
            (Point::Sphere { .. }, Point::Sphere { .. }) => {
                let u = p.unit3();
                let v = q.unit3();
                let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
                let cx = u[1] * v[2] - u[2] * v[1];
                let cy = u[2] * v[0] - u[0] * v[2];
                let cz = u[0] * v[1] - u[1] * v[0];
                let cross = (cx * cx + cy * cy + cz * cz).sqrt();
                cross.atan2(dot)
            }
            _ => panic!("points belong to different manifolds"),
        }
    }

    /// Volume of a metric ball of radius `r`; independent of the center on
    /// these homogeneous manifolds. Saturates at the total volume.
    pub fn ball_volume(&self, r: f64) -> f64 {
        let r = r.max(0.0);
        match self.kind {
            ManifoldKind::Circle => (2.0 * r).min(TAU),
            ManifoldKind::Sphere2 => TAU * (1.0 - r.min(PI).cos()),
            ManifoldKind::Torus2 => {
                if r <= PI {
                    PI * r * r
                } else if r * r <= 2.0 * PI * PI {
                    // Disk area minus the four segments clipped by the
                    // fundamental square of half-width π.
                    let seg = r * r * (PI / r).acos() - PI * (r * r - PI * PI).sqrt();
                    PI * r * r - 4.0 * seg
                } else {
                    TAU * TAU
                }
            }
        }
    }

    /// The eigenpairs with eigenvalue at most `cutoff`, ordered by
    /// (eigenvalue, canonical within-level order).
    ///
    /// Circle: `λ = m²` with `cos(mθ)/√π` before `sin(mθ)/√π`. Torus:
    /// products of circle factors, levels ordered lexicographically by
    /// `(m₁, m₂)` and cos factors before sin. Sphere: `λ = l(l+1)`, real
    /// spherical harmonics ordered `-l ≤ order ≤ l`.
    pub fn eigen_basis(&self, cutoff: f64) -> Vec<Mode> {
        assert!(cutoff >= 0.0, "cutoff must be nonnegative");
        let mut modes = Vec::new();
        match self.kind {
            ManifoldKind::Circle => {
                modes.push(Mode::Circle(CircleMode::Const));
                let mut m = 1u32;
                while (m as f64) * (m as f64) <= cutoff {
                    modes.push(Mode::Circle(CircleMode::Cos(m)));
                    modes.push(Mode::Circle(CircleMode::Sin(m)));
                    m += 1;
                }
            }
            ManifoldKind::Torus2 => {
                let mut levels = Vec::new();
                let mut m1 = 0u64;
                while (m1 * m1) as f64 <= cutoff {
                    let mut m2 = 0u64;
                    while (m1 * m1 + m2 * m2) as f64 <= cutoff {
                        levels.push((m1 * m1 + m2 * m2, m1 as u32, m2 as u32));
                        m2 += 1;
                    }
                    m1 += 1;
                }
                levels.sort_unstable();
                for (_, m1, m2) in levels {
                    for f1 in factor_variants(m1) {
                        for f2 in factor_variants(m2) {
                            modes.push(Mode::Torus(f1, f2));
                        }
                    }
                }
            }
            ManifoldKind::Sphere2 => {
                let mut l = 0u32;
                while (l as f64) * (l as f64 + 1.0) <= cutoff {
                    for order in -(l as i32)..=(l as i32) {
                        modes.push(Mode::Sphere { degree: l, order });
                    }
                    l += 1;
                }
            }
        }
        modes
    }

    /// `dim E_cutoff`, the number of eigenpairs returned by
    /// [`eigen_basis`](Self::eigen_basis).
    pub fn band_dimension(&self, cutoff: f64) -> usize {
        self.eigen_basis(cutoff).len()
    }

    /// Largest per-axis trigonometric frequency (or harmonic degree) present
    /// in `E_cutoff`.
    pub fn max_degree(&self, cutoff: f64) -> u32 {
        assert!(cutoff >= 0.0);
        match self.kind {
            ManifoldKind::Circle | ManifoldKind::Torus2 => cutoff.sqrt().floor() as u32,
            ManifoldKind::Sphere2 => {
                let mut l = 0u32;
                while ((l + 1) as f64) * ((l + 2) as f64) <= cutoff {
                    l += 1;
                }
                l
            }
        }
    }

    /// Smallest reference quadrature resolution that integrates products of
    /// total trigonometric degree (or harmonic degree) `degree` exactly.
    pub fn exact_resolution(&self, degree: u32) -> usize {
        match self.kind {
            // Composite trapezoid with N points integrates e^{imθ} exactly
            // unless N divides m, so N = degree + 1 suffices.
            ManifoldKind::Circle | ManifoldKind::Torus2 => (degree as usize + 1).max(2),
            // Gauss-Legendre with r nodes handles colatitude degree 2r - 1;
            // 2r longitude points handle |m| ≤ 2r - 1.
            ManifoldKind::Sphere2 => (degree as usize / 2 + 1).max(2),
        }
    }

    /// Reference product quadrature at the given per-axis resolution.
    pub fn quadrature(&self, resolution: usize) -> Quadrature {
        quadrature::build(*self, resolution)
    }

    /// Reference integral of `f` at a fixed resolution.
    pub fn integrate<F: Fn(&Point) -> f64>(&self, f: F, resolution: usize) -> f64 {
        self.quadrature(resolution).apply(&f)
    }

    /// Reference integral with self-validating resolution: doubles the
    /// resolution until two consecutive results agree to 1e-12 relative,
    /// capped at 512 per axis.
    pub fn integrate_auto<F: Fn(&Point) -> f64>(&self, f: F) -> f64 {
        let mut resolution = 16usize;
        let mut value = self.integrate(&f, resolution);
        while resolution < 512 {
            let next = (resolution * 2).min(512);
            let refined = self.integrate(&f, next);
            if (refined - value).abs() <= 1e-12 * refined.abs().max(1.0) {
                return refined;
            }
            value = refined;
            resolution = next;
        }
        value
    }

    /// Uniformly distributed random point, for property tests and probes.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self.kind {
            ManifoldKind::Circle => Point::circle(rng.gen_range(0.0..TAU)),
            ManifoldKind::Torus2 => {
                Point::torus(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU))
            }
            ManifoldKind::Sphere2 => {
                let z: f64 = rng.gen_range(-1.0..1.0);
                Point::sphere(z.acos(), rng.gen_range(0.0..TAU))
            }
        }
    }
}

fn arc(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(TAU - d)
}

fn factor_variants(m: u32) -> Vec<CircleMode> {
    if m == 0 {
        vec![CircleMode::Const]
    } else {
        vec![CircleMode::Cos(m), CircleMode::Sin(m)]
    }
}

/// Closed-form Laplacian applied to an eigenfunction on the circle or torus,
/// computed from hand-written second derivatives rather than the stored
/// eigenvalue; used by tests as an independent path.
pub fn analytic_laplacian(mode: &Mode, p: &Point) -> f64 {
    match (*mode, *p) {
        (Mode::Circle(c), Point::Circle { theta }) => -c.second_derivative(theta),
        (Mode::Torus(c1, c2), Point::Torus { theta1, theta2 }) => {
            -(c1.second_derivative(theta1) * c2.eval(theta2)
                + c1.eval(theta1) * c2.second_derivative(theta2))
        }
        _ => panic!("analytic Laplacian is closed-form only on circle and torus"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eigen_basis_counts_and_levels() {
        let circle = Manifold::circle().eigen_basis(4.5);
        let lam: Vec<f64> = circle.iter().map(Mode::eigenvalue).collect();
        assert_eq!(lam, vec![0.0, 1.0, 1.0, 4.0, 4.0]);

        let sphere = Manifold::sphere().eigen_basis(6.5);
        let lam: Vec<f64> = sphere.iter().map(Mode::eigenvalue).collect();
        assert_eq!(lam, vec![0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0]);

        let torus = Manifold::torus().eigen_basis(1.5);
        let lam: Vec<f64> = torus.iter().map(Mode::eigenvalue).collect();
        assert_eq!(lam, vec![0.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn eigenvalues_nondecreasing_and_constant_first() {
        for m in [Manifold::circle(), Manifold::torus(), Manifold::sphere()] {
            let basis = m.eigen_basis(30.0);
            assert_eq!(basis[0].eigenvalue(), 0.0);
            let p = m.point(&vec![0.9; m.dim()]).unwrap();
            assert_abs_diff_eq!(
                basis[0].eval(&p),
                1.0 / m.volume().sqrt(),
                epsilon = 1e-15
            );
            for w in basis.windows(2) {
                assert!(w[0].eigenvalue() <= w[1].eigenvalue());
            }
        }
    }

    #[test]
    fn distances_match_closed_forms() {
        let c = Manifold::circle();
        assert_abs_diff_eq!(
            c.distance(&Point::circle(0.0), &Point::circle(1.5 * PI)),
            PI / 2.0,
            epsilon = 1e-15
        );

        let s = Manifold::sphere();
        let north = Point::sphere(0.0, 0.0);
        let south = Point::sphere(PI, 0.0);
        assert_abs_diff_eq!(s.distance(&north, &south), PI, epsilon = 1e-12);

        let t = Manifold::torus();
        assert_abs_diff_eq!(
            t.distance(&Point::torus(0.0, 0.0), &Point::torus(PI, PI)),
            PI * std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn distance_symmetry_and_triangle_inequality() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for m in [Manifold::circle(), Manifold::torus(), Manifold::sphere()] {
            for _ in 0..200 {
                let p = m.random_point(&mut rng);
                let q = m.random_point(&mut rng);
                let r = m.random_point(&mut rng);
                let pq = m.distance(&p, &q);
                assert_abs_diff_eq!(pq, m.distance(&q, &p), epsilon = 1e-13);
                assert!(pq <= m.distance(&p, &r) + m.distance(&r, &q) + 1e-12);
                assert!(pq <= m.diameter() + 1e-12);
            }
        }
    }

    #[test]
    fn sphere_pole_longitude_normalized() {
        let p = Point::sphere(0.0, 2.3);
        assert_eq!(p, Point::Sphere { colat: 0.0, lon: 0.0 });
        let q = Point::sphere(-0.5, 1.0);
        match q {
            Point::Sphere { colat, lon } => {
                assert_abs_diff_eq!(colat, 0.5, epsilon = 1e-15);
                assert_abs_diff_eq!(lon, 1.0 + PI, epsilon = 1e-15);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn reference_integral_closed_forms() {
        let c = Manifold::circle();
        let half_volume = c.integrate(
            |p| match p {
                Point::Circle { theta } => theta.cos().powi(2),
                _ => unreachable!(),
            },
            64,
        );
        assert_abs_diff_eq!(half_volume, PI, epsilon = 1e-12);

        let s = Manifold::sphere();
        assert_abs_diff_eq!(s.integrate(|_| 1.0, 16), 4.0 * PI, epsilon = 1e-11);

        let y = Mode::Sphere { degree: 3, order: 2 };
        let at8 = s.integrate(|p| y.eval(p) * y.eval(p), 8);
        let at32 = s.integrate(|p| y.eval(p) * y.eval(p), 32);
        assert_abs_diff_eq!(at8, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(at8, at32, epsilon = 1e-12);
    }

    #[test]
    fn orthonormality_under_reference_integral() {
        for m in [Manifold::circle(), Manifold::torus(), Manifold::sphere()] {
            let basis = m.eigen_basis(50.0);
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate().skip(i) {
                    let resolution = m.exact_resolution(a.degree() + b.degree());
                    let ip = m.integrate(|p| a.eval(p) * b.eval(p), resolution);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (ip - expected).abs() <= 1e-10,
                        "{:?}: <u_{i}, u_{j}> = {ip}",
                        m.kind()
                    );
                }
            }
        }
    }

    #[test]
    fn eigen_relation_closed_form_on_circle_and_torus() {
        for m in [Manifold::circle(), Manifold::torus()] {
            let basis = m.eigen_basis(29.0);
            for mode in &basis {
                for i in 0..40 {
                    let x = 0.1 + 0.15 * i as f64;
                    let p = m.point(&vec![x; m.dim()]).unwrap();
                    let lhs = analytic_laplacian(mode, &p);
                    let rhs = mode.eigenvalue() * mode.eval(&p);
                    assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn sphere_eigen_relation_spectral_finite_difference() {
        // Laplacian through the degree-0 homogeneous extension: for u on the
        // sphere, Δ_{R^3} u(x/|x|) at |x| = 1 equals the surface Laplacian,
        // which must be -λ u. Fourth-order central differences keep the
        // truncation error below the 1e-6 target.
        let s = Manifold::sphere();
        let h = 3e-3;
        for mode in [
            Mode::Sphere { degree: 3, order: -2 },
            Mode::Sphere { degree: 5, order: 4 },
            Mode::Sphere { degree: 6, order: 0 },
        ] {
            let fd_laplacian = |p: &Point| {
                let x0 = p.unit3();
                let eval_ext = |x: [f64; 3]| {
                    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                    let colat = (x[2] / r).clamp(-1.0, 1.0).acos();
                    let lon = x[1].atan2(x[0]);
                    mode.eval(&Point::sphere(colat, lon))
                };
                let mut acc = 0.0;
                for axis in 0..3 {
                    let shift = |k: f64| {
                        let mut x = x0;
                        x[axis] += k * h;
                        eval_ext(x)
                    };
                    acc += (-shift(2.0) + 16.0 * shift(1.0) - 30.0 * shift(0.0)
                        + 16.0 * shift(-1.0)
                        - shift(-2.0))
                        / (12.0 * h * h);
                }
                -acc
            };
            let coeffs = crate::spectral::analyze(&s, fd_laplacian, 50.0, 24);
            for (other, c) in s.eigen_basis(50.0).iter().zip(coeffs.coefficients()) {
                let expected = if *other == mode { mode.eigenvalue() } else { 0.0 };
                assert!(
                    (c - expected).abs() <= 1e-6 * mode.eigenvalue(),
                    "mode {mode:?}: coefficient {c} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn band_dimension_tracks_weyl_scaling() {
        for m in [Manifold::circle(), Manifold::torus(), Manifold::sphere()] {
            let n_half = m.dim() as f64 / 2.0;
            let ratios: Vec<f64> = [10.0, 20.0, 40.0, 80.0, 160.0, 200.0]
                .iter()
                .map(|w| m.band_dimension(*w) as f64 / w.powf(n_half))
                .collect();
            let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
            let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
            assert!(min > 0.0 && max / min <= 3.0, "{:?}: {ratios:?}", m.kind());
        }
    }

    #[test]
    fn ball_volume_closed_forms_and_saturation() {
        let c = Manifold::circle();
        assert_abs_diff_eq!(c.ball_volume(0.25), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c.ball_volume(10.0), TAU, epsilon = 1e-15);

        let s = Manifold::sphere();
        assert_abs_diff_eq!(s.ball_volume(PI / 2.0), TAU, epsilon = 1e-12);
        assert_abs_diff_eq!(s.ball_volume(PI), 4.0 * PI, epsilon = 1e-12);

        let t = Manifold::torus();
        assert_abs_diff_eq!(t.ball_volume(1.0), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(t.ball_volume(5.0), TAU * TAU, epsilon = 1e-12);
        // Wrapped regime against a quadrature of the indicator.
        let r = 3.5;
        let indicator = t.integrate(
            |p| {
                if t.distance(p, &Point::torus(0.0, 0.0)) <= r {
                    1.0
                } else {
                    0.0
                }
            },
            512,
        );
        assert!((t.ball_volume(r) - indicator).abs() < 0.05);
    }

    #[test]
    fn descriptor_json_shape_and_round_trip() {
        let m = Manifold::sphere();
        let json = serde_json::to_value(m).unwrap();
        assert_eq!(json["kind"], "sphere2");
        assert_eq!(json["n"], 2);
        assert_eq!(json["group_dim"], 3);
        assert_eq!(json["volume"].as_f64().unwrap(), 4.0 * PI);
        let back: Manifold = serde_json::from_value(json).unwrap();
        assert_eq!(back, m);

        let bad = serde_json::json!({
            "kind": "circle", "n": 2, "volume": TAU, "group_dim": 1
        });
        assert!(serde_json::from_value::<Manifold>(bad).is_err());
    }

    #[test]
    fn integrate_auto_is_stable() {
        let t = Manifold::torus();
        let f = |p: &Point| match p {
            Point::Torus { theta1, theta2 } => (theta1.cos() + (2.0 * theta2).sin()).exp(),
            _ => unreachable!(),
        };
        let auto = t.integrate_auto(f);
        let dense = t.integrate(f, 400);
        assert_abs_diff_eq!(auto, dense, epsilon = 1e-9 * dense.abs());
    }
}
