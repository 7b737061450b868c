//! Metric rho-lattices: point sets whose pairwise distances are at least
//! rho/2 while their rho/2 balls still cover the manifold. Includes the
//! greedy builder, separation/covering certification, Voronoi cell measures,
//! and the Weyl-rate point-count table.

use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldKind, Point};

/// Relative slack applied to the separation threshold so candidate grids
/// aligned at exact multiples of rho/2 are not rejected by rounding.
const SEPARATION_SLACK: f64 = 1e-12;

/// An ordered point set with separation >= rho/2, built to also satisfy
/// covering radius <= rho/2 up to candidate-grid resolution (certified a
/// posteriori by [`Lattice::verify`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct Lattice {
    manifold: Manifold,
    rho: f64,
    seed: u64,
    points: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    manifold: Manifold,
    rho: f64,
    seed: u64,
    points: Vec<Vec<f64>>,
}

impl From<Lattice> for LatticeRepr {
    fn from(l: Lattice) -> Self {
        LatticeRepr {
            manifold: l.manifold,
            rho: l.rho,
            seed: l.seed,
            points: l.points.iter().map(Point::coords).collect(),
        }
    }
}

impl TryFrom<LatticeRepr> for Lattice {
    type Error = Error;

    fn try_from(r: LatticeRepr) -> Result<Self> {
        let points = r
            .points
            .iter()
            .map(|c| r.manifold.point(c))
            .collect::<Result<Vec<_>>>()?;
        Lattice::from_points(r.manifold, r.rho, r.seed, points)
    }
}

/// Separation, covering and overlap measurements of a point set.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LatticeReport {
    pub min_separation: f64,
    pub covering_radius: f64,
    /// Max over probe points of the number of nodes strictly within rho.
    pub multiplicity: usize,
    pub point_count: usize,
}

impl Lattice {
    /// Greedy maximal (rho/2)-separated set.
    ///
    /// Sweeps a dense deterministic candidate grid (stratified per manifold,
    /// shuffled by the seed; seed 0 keeps natural grid order) and accepts a
    /// candidate iff it is at least rho/2 away from everything accepted so
    /// far. Rejection depends only on earlier acceptances, so a second sweep
    /// could never accept anything: one pass reaches the fixed point, and
    /// maximality over the grid delivers the covering property.
    pub fn build(manifold: Manifold, rho: f64, seed: u64) -> Result<Lattice> {
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::InvalidRho(rho));
        }
        if rho > manifold.diameter() {
            return Err(Error::RhoTooLarge {
                rho,
                diameter: manifold.diameter(),
            });
        }
        let candidates = candidate_grid(manifold, rho);
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        if seed != 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);
        }
        let threshold = 0.5 * rho * (1.0 - SEPARATION_SLACK);
        let points = match manifold.kind() {
            ManifoldKind::Circle => greedy_circle(&candidates, &order, threshold),
            ManifoldKind::Torus2 => greedy_torus(&candidates, &order, threshold),
            ManifoldKind::Sphere2 => greedy_sphere(&candidates, &order, threshold),
        };
        Ok(Lattice {
            manifold,
            rho,
            seed,
            points,
        })
    }

    /// Wraps an explicit point set, checking the separation invariant. The
    /// covering half is certified separately by [`Lattice::verify`], since
    /// it needs a dense probe sweep.
    pub fn from_points(
        manifold: Manifold,
        rho: f64,
        seed: u64,
        points: Vec<Point>,
    ) -> Result<Lattice> {
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::InvalidRho(rho));
        }
        if points.is_empty() {
            return Err(Error::NotALattice {
                rho,
                reason: "empty point set".into(),
            });
        }
        let floor = 0.5 * rho * (1.0 - 1e-9);
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let d = manifold.distance(&points[i], &points[j]);
                if d < floor {
                    return Err(Error::NotALattice {
                        rho,
                        reason: format!(
                            "points {i} and {j} are {d} apart, below rho/2 = {}",
                            0.5 * rho
                        ),
                    });
                }
            }
        }
        Ok(Lattice {
            manifold,
            rho,
            seed,
            points,
        })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Probe density giving probe spacing rho/12, comfortably below the
    /// rho/10 that [`Lattice::verify`] requires.
    pub fn recommended_probe_density(&self) -> usize {
        (24.0 * PI / self.rho).ceil() as usize
    }

    /// Quadrature resolution whose node spacing is about rho/16 (capped at
    /// the oracle's 512-per-axis limit), adequate for Voronoi measures.
    pub fn recommended_voronoi_resolution(&self) -> usize {
        let wanted = match self.manifold.kind() {
            ManifoldKind::Circle | ManifoldKind::Torus2 => 32.0 * PI / self.rho,
            ManifoldKind::Sphere2 => 16.0 * PI / self.rho,
        };
        (wanted.ceil() as usize).clamp(16, 512)
    }

    /// Measures exact separation, covering radius and ball-overlap
    /// multiplicity over a probe grid with spacing 2π/probe_density.
    ///
    /// Fails with [`Error::NotALattice`] when the separation invariant is
    /// violated or the covering radius exceeds rho/2 by more than one probe
    /// spacing (the grid's resolution limit).
    pub fn verify(&self, probe_density: usize) -> Result<LatticeReport> {
        let spacing = TAU / probe_density as f64;
        assert!(
            spacing < self.rho / 10.0,
            "probe spacing {spacing} too coarse for rho = {}",
            self.rho
        );
        let mut min_separation = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                min_separation =
                    min_separation.min(self.manifold.distance(&self.points[i], &self.points[j]));
            }
        }
        if self.points.len() == 1 {
            min_separation = f64::INFINITY;
        }

        let probes = probe_grid(self.manifold, probe_density);
        let mut covering_radius = 0.0f64;
        let mut multiplicity = 0usize;
        match self.manifold.kind() {
            ManifoldKind::Sphere2 => {
                let nodes: Vec<[f64; 3]> = self.points.iter().map(Point::unit3).collect();
                let cos_rho = self.rho.min(PI).cos();
                for p in &probes {
                    let u = p.unit3();
                    let mut best = -1.0f64;
                    let mut within = 0usize;
                    for v in &nodes {
                        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
                        if dot > best {
                            best = dot;
                        }
                        if dot > cos_rho {
                            within += 1;
                        }
                    }
                    covering_radius = covering_radius.max(best.clamp(-1.0, 1.0).acos());
                    multiplicity = multiplicity.max(within);
                }
            }
            _ => {
                for p in &probes {
                    let mut nearest = f64::INFINITY;
                    let mut within = 0usize;
                    for q in &self.points {
                        let d = self.manifold.distance(p, q);
                        nearest = nearest.min(d);
                        if d < self.rho {
                            within += 1;
                        }
                    }
                    covering_radius = covering_radius.max(nearest);
                    multiplicity = multiplicity.max(within);
                }
            }
        }

        if min_separation < 0.5 * self.rho * (1.0 - 1e-9) {
            return Err(Error::NotALattice {
                rho: self.rho,
                reason: format!("min separation {min_separation} below rho/2"),
            });
        }
        if covering_radius > 0.5 * self.rho + spacing {
            return Err(Error::NotALattice {
                rho: self.rho,
                reason: format!(
                    "covering radius {covering_radius} exceeds rho/2 = {} beyond probe margin",
                    0.5 * self.rho
                ),
            });
        }
        Ok(LatticeReport {
            min_separation,
            covering_radius,
            multiplicity,
            point_count: self.points.len(),
        })
    }

    /// Voronoi cell measures: every reference-quadrature node is assigned,
    /// with its quadrature weight, to the nearest lattice node (ties to the
    /// lowest index), and the weights are summed per cell.
    pub fn voronoi_measures(&self, resolution: usize) -> VoronoiWeights {
        let quad = self.manifold.quadrature(resolution);
        let mut measures = vec![0.0f64; self.points.len()];
        match self.manifold.kind() {
            ManifoldKind::Sphere2 => {
                let nodes: Vec<[f64; 3]> = self.points.iter().map(Point::unit3).collect();
                for (p, w) in quad.points.iter().zip(&quad.weights) {
                    let u = p.unit3();
                    let mut best = f64::MIN;
                    let mut idx = 0usize;
                    for (k, v) in nodes.iter().enumerate() {
                        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
                        if dot > best {
                            best = dot;
                            idx = k;
                        }
                    }
                    measures[idx] += w;
                }
            }
            _ => {
                for (p, w) in quad.points.iter().zip(&quad.weights) {
                    let mut best = f64::INFINITY;
                    let mut idx = 0usize;
                    for (k, q) in self.points.iter().enumerate() {
                        let d = self.manifold.distance(p, q);
                        if d < best {
                            best = d;
                            idx = k;
                        }
                    }
                    measures[idx] += w;
                }
            }
        }
        VoronoiWeights {
            lattice: self.clone(),
            measures,
            resolution,
        }
    }
}

/// Voronoi cell measures attached to their lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VoronoiRepr", into = "VoronoiRepr")]
pub struct VoronoiWeights {
    lattice: Lattice,
    measures: Vec<f64>,
    resolution: usize,
}

#[derive(Serialize, Deserialize)]
struct VoronoiRepr {
    #[serde(flatten)]
    lattice: Lattice,
    measures: Vec<f64>,
    resolution: usize,
}

impl From<VoronoiWeights> for VoronoiRepr {
    fn from(v: VoronoiWeights) -> Self {
        VoronoiRepr {
            lattice: v.lattice,
            measures: v.measures,
            resolution: v.resolution,
        }
    }
}

impl TryFrom<VoronoiRepr> for VoronoiWeights {
    type Error = Error;

    fn try_from(r: VoronoiRepr) -> Result<Self> {
        if r.measures.len() != r.lattice.len() {
            return Err(Error::LengthMismatch {
                expected: r.lattice.len(),
                got: r.measures.len(),
            });
        }
        if r.measures.iter().any(|m| !m.is_finite() || *m <= 0.0) {
            return Err(Error::InvalidArtifact(
                "Voronoi measures must be strictly positive".into(),
            ));
        }
        let volume = r.lattice.manifold().volume();
        let total: f64 = r.measures.iter().sum();
        if (total - volume).abs() > 1e-9 * volume {
            return Err(Error::InvalidArtifact(format!(
                "Voronoi measures sum to {total}, expected the volume {volume}"
            )));
        }
        Ok(VoronoiWeights {
            lattice: r.lattice,
            measures: r.measures,
            resolution: r.resolution,
        })
    }
}

impl VoronoiWeights {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }
}

/// One row of the Weyl-rate table: a lattice built at rho = c0·omega^{-1/2}
/// and its point count against the omega^{n/2} scaling.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeylRow {
    pub omega: f64,
    pub rho: f64,
    pub point_count: usize,
    /// `point_count / omega^{n/2}`.
    pub ratio: f64,
}

/// Builds one lattice per omega at rho = c0·omega^{-1/2} and tabulates the
/// point-count ratios; the ratio column staying within a bounded spread is
/// the Weyl-rate check performed by callers.
pub fn weyl_count_check(
    manifold: Manifold,
    omegas: &[f64],
    c0: f64,
    seed: u64,
) -> Result<Vec<WeylRow>> {
    assert!(c0 > 0.0, "c0 must be positive");
    let mut rows = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        assert!(omega > 0.0, "omega must be positive");
        let rho = c0 / omega.sqrt();
        let lattice = Lattice::build(manifold, rho, seed)?;
        let ratio = lattice.len() as f64 / omega.powf(manifold.dim() as f64 / 2.0);
        rows.push(WeylRow {
            omega,
            rho,
            point_count: lattice.len(),
            ratio,
        });
    }
    Ok(rows)
}

/// Dense deterministic candidate grid per manifold. Circle and torus grids
/// step by rho/64 and rho/32 per axis (exact binary fractions of rho, so
/// multiples of rho/2 appear verbatim in the stream); the sphere uses
/// stratified colatitude bands. Spacings are floored so the grid never
/// exceeds a fixed size budget.
fn candidate_grid(manifold: Manifold, rho: f64) -> Vec<Point> {
    match manifold.kind() {
        ManifoldKind::Circle => {
            let step = rho / 64.0;
            let count = (TAU / step).ceil() as usize;
            (0..count).map(|k| Point::circle(k as f64 * step)).collect()
        }
        ManifoldKind::Torus2 => {
            let step = (rho / 32.0).max(TAU / 500.0);
            let count = (TAU / step).ceil() as usize;
            let mut points = Vec::with_capacity(count * count);
            for i in 0..count {
                for j in 0..count {
                    points.push(Point::torus(i as f64 * step, j as f64 * step));
                }
            }
            points
        }
        ManifoldKind::Sphere2 => {
            let step = (rho / 32.0).max(7.1e-3);
            let bands = (PI / step).ceil() as usize;
            let mut points = Vec::new();
            for i in 0..bands {
                let colat = (i as f64 + 0.5) * PI / bands as f64;
                let n_lon = ((TAU * colat.sin() / step).ceil() as usize).max(1);
                for j in 0..n_lon {
                    points.push(Point::sphere(colat, j as f64 * TAU / n_lon as f64));
                }
            }
            points
        }
    }
}

/// Probe grid used by certification; spacing 2π/density per axis.
fn probe_grid(manifold: Manifold, density: usize) -> Vec<Point> {
    match manifold.kind() {
        ManifoldKind::Circle => (0..density)
            .map(|k| Point::circle(k as f64 * TAU / density as f64))
            .collect(),
        ManifoldKind::Torus2 => {
            let step = TAU / density as f64;
            let mut points = Vec::with_capacity(density * density);
            for i in 0..density {
                for j in 0..density {
                    points.push(Point::torus(i as f64 * step, j as f64 * step));
                }
            }
            points
        }
        ManifoldKind::Sphere2 => {
            let bands = density.div_ceil(2);
            let mut points = Vec::new();
            for i in 0..bands {
                let colat = (i as f64 + 0.5) * PI / bands as f64;
                let n_lon = ((density as f64 * colat.sin()).ceil() as usize).max(1);
                for j in 0..n_lon {
                    points.push(Point::sphere(colat, j as f64 * TAU / n_lon as f64));
                }
            }
            points
        }
    }
}

fn greedy_circle(candidates: &[Point], order: &[usize], threshold: f64) -> Vec<Point> {
    let mut accepted: Vec<f64> = Vec::new();
    let mut points = Vec::new();
    for &i in order {
        let theta = match candidates[i] {
            Point::Circle { theta } => theta,
            _ => unreachable!(),
        };
        let ok = accepted.iter().all(|t| {
            let d = (theta - t).abs();
            d.min(TAU - d) >= threshold
        });
        if ok {
            accepted.push(theta);
            points.push(candidates[i]);
        }
    }
    points
}

fn greedy_torus(candidates: &[Point], order: &[usize], threshold: f64) -> Vec<Point> {
    let t2 = threshold * threshold;
    let mut accepted: Vec<(f64, f64)> = Vec::new();
    let mut points = Vec::new();
    for &i in order {
        let (a1, a2) = match candidates[i] {
            Point::Torus { theta1, theta2 } => (theta1, theta2),
            _ => unreachable!(),
        };
        let ok = accepted.iter().all(|&(b1, b2)| {
            let d1 = {
                let d = (a1 - b1).abs();
                d.min(TAU - d)
            };
            let d2 = {
                let d = (a2 - b2).abs();
                d.min(TAU - d)
            };
            d1 * d1 + d2 * d2 >= t2
        });
        if ok {
            accepted.push((a1, a2));
            points.push(candidates[i]);
        }
    }
    points
}

fn greedy_sphere(candidates: &[Point], order: &[usize], threshold: f64) -> Vec<Point> {
    // Geodesic distance < t is equivalent to dot product > cos t.
    let cos_t = threshold.cos();
    let xyz: Vec<[f64; 3]> = candidates.iter().map(Point::unit3).collect();
    let mut accepted: Vec<[f64; 3]> = Vec::new();
    let mut points = Vec::new();
    for &i in order {
        let u = xyz[i];
        let ok = accepted
            .iter()
            .all(|v| u[0] * v[0] + u[1] * v[1] + u[2] * v[2] <= cos_t);
        if ok {
            accepted.push(u);
            points.push(candidates[i]);
        }
    }
    points
}
