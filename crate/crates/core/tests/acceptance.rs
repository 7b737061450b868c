//! End-to-end acceptance checks, one test per headline guarantee of the
//! crate. Every test finishes by printing a single `acceptance NN <name>:
//! PASS` line with the measured quantities, so a run with `--nocapture`
//! doubles as a checklist.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bandlimit::homogeneous::{
    derivative_identity_check, discrete_fourier_transform, product_bandlimit_check,
};
use bandlimit::lattice::weyl_count_check;
use bandlimit::{
    CubatureRule, Error, Lattice, Manifold, Point, SamplingMatrix, SpectralFunction, SplineModel,
};

/// N nodes at exactly uniform spacing; the declared rho leaves slack below
/// the separation threshold so accumulated angle roundoff cannot reject the
/// wrap-around gap.
fn equispaced_circle(n: usize) -> Lattice {
    let step = TAU / n as f64;
    let points = (0..n).map(|k| Point::circle(k as f64 * step)).collect();
    Lattice::from_points(Manifold::circle(), 1.9 * step, 0, points).unwrap()
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let cov: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let var: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    cov / var
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn acceptance_01_exact_cubature() {
    // Equispaced circle: the min-norm weights collapse to the trapezoid rule.
    let lat = Lattice::build(Manifold::circle(), FRAC_PI_2, 0).unwrap();
    assert_eq!(lat.len(), 8);
    let rule = CubatureRule::exact_weights(&SamplingMatrix::build(&lat, 4.0)).unwrap();
    for w in rule.weights() {
        assert!((w - PI / 4.0).abs() <= 1e-12, "weight {w} is not pi/4");
    }

    // Scattered sphere lattice: exactness residual plus the Plancherel
    // oracle (the integral of any band-limited f is its constant coefficient
    // times sqrt of the volume).
    let sphere = Manifold::sphere();
    let lat = Lattice::build(sphere, 0.5, 1).unwrap();
    let omega = 12.5;
    let rule = CubatureRule::exact_weights(&SamplingMatrix::build(&lat, omega)).unwrap();
    let residual = rule.exactness_residual();
    assert!(residual <= 1e-10, "sphere exactness residual {residual}");

    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let f = SpectralFunction::random(sphere, omega, &mut rng);
        let exact = f.coefficients()[0] * sphere.volume().sqrt();
        let got = rule.integrate(&f.synthesize(lat.points())).unwrap();
        worst = worst.max((got - exact).abs());
    }
    assert!(worst <= 1e-9, "worst integral error {worst}");
    println!(
        "acceptance 01 exact cubature: PASS (sphere residual {residual:.2e}, \
         worst of 200 integrals {worst:.2e})"
    );
}

#[test]
fn acceptance_02_positive_cubature_seed_stability() {
    let sphere = Manifold::sphere();
    let omega: f64 = 6.5;
    let rho: f64 = 0.17;
    assert!(rho * (1.0 + omega).sqrt() <= 0.5);

    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    let mut worst_residual = 0.0f64;
    for seed in 1..=10 {
        let lat = Lattice::build(sphere, rho, seed).unwrap();
        let voronoi = lat.voronoi_measures(256);
        let matrix = SamplingMatrix::build(&lat, omega);
        let rule = CubatureRule::positive_weights(&matrix, &voronoi).unwrap();
        assert!(rule.positive(), "seed {seed} produced a sign change");
        worst_residual = worst_residual.max(rule.exactness_residual());
        for w in rule.weights() {
            assert!(*w > 0.0);
            c1 = c1.min(w / (rho * rho));
            c2 = c2.max(w / (rho * rho));
        }
    }
    assert!(
        worst_residual <= 1e-10,
        "worst exactness residual {worst_residual}"
    );
    assert!(
        c2 <= 10.0 * c1,
        "normalized weights spread [{c1}, {c2}] exceeds 10x"
    );
    println!(
        "acceptance 02 positive cubature: PASS (w/rho^2 in [{c1:.3}, {c2:.3}], \
         worst residual {worst_residual:.2e})"
    );
}

#[test]
fn acceptance_03_frame_bounds() {
    // Equispaced nodes give a tight frame.
    let lat = Lattice::build(Manifold::circle(), FRAC_PI_2, 0).unwrap();
    let tight = SamplingMatrix::build(&lat, 4.0).frame_bounds();
    let gap = tight.b / tight.a - 1.0;
    assert!(gap <= 1e-10, "tight-frame gap {gap}");

    // Scattered sphere lattices at a fixed oversampling rate c0 = rho*sqrt(omega):
    // the bound ratio is seed-stable.
    let sphere = Manifold::sphere();
    let omega = 6.5;
    let rho = 0.196;
    let ratios: Vec<f64> = (1..=10)
        .map(|seed| {
            let lat = Lattice::build(sphere, rho, seed).unwrap();
            let fb = SamplingMatrix::build(&lat, omega).frame_bounds();
            assert!(fb.a > 0.0, "seed {seed} is not a frame");
            fb.b / fb.a
        })
        .collect();
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median = 0.5 * (sorted[4] + sorted[5]);
    for r in &ratios {
        assert!(
            *r <= 2.0 * median && *r >= 0.5 * median,
            "B/A {r} strays beyond 2x from median {median}"
        );
    }
    println!(
        "acceptance 03 frame bounds: PASS (tight gap {gap:.2e}, sphere B/A \
         median {median:.3}, spread {:.3}..{:.3})",
        sorted[0], sorted[9]
    );
}

#[test]
fn acceptance_04_reconstruction_round_trip() {
    let cases = [
        (Manifold::circle(), 16.0, 0.15, 2u64),
        (Manifold::torus(), 8.0, 0.5, 3),
        (Manifold::sphere(), 6.5, 0.3, 4),
    ];
    let mut worst = 0.0f64;
    for (manifold, omega, rho, seed) in cases {
        let lat = Lattice::build(manifold, rho, seed).unwrap();
        let matrix = SamplingMatrix::build(&lat, omega);
        let mut rng = ChaCha8Rng::seed_from_u64(400 + seed);
        let mut worst_here = 0.0f64;
        for _ in 0..100 {
            let f = SpectralFunction::random(manifold, omega, &mut rng);
            let g = matrix.reconstruct(&f.synthesize(lat.points())).unwrap();
            worst_here = worst_here.max(max_abs_diff(f.coefficients(), g.coefficients()));
        }
        assert!(
            worst_here <= 1e-9,
            "{:?} round-trip error {worst_here}",
            manifold.kind()
        );
        worst = worst.max(worst_here);
    }
    println!("acceptance 04 reconstruction: PASS (worst coefficient error {worst:.2e})");
}

#[test]
fn acceptance_05_point_counts_track_band_dimension() {
    // omega^{n/2} scaling of lattice sizes at rho = omega^{-1/2}, over a
    // 16x cutoff range per manifold.
    let cases = [
        (Manifold::circle(), [16.0, 64.0, 256.0]),
        (Manifold::torus(), [2.25, 9.0, 36.0]),
        (Manifold::sphere(), [4.0, 16.0, 64.0]),
    ];
    let mut spreads = Vec::new();
    for (manifold, omegas) in cases {
        let rows = weyl_count_check(manifold, &omegas, 1.0, 0).unwrap();
        let hi = rows.iter().map(|r| r.ratio).fold(0.0f64, f64::max);
        let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        assert!(
            hi <= 4.0 * lo,
            "{:?} ratio spread {} exceeds 4x",
            manifold.kind(),
            hi / lo
        );
        spreads.push(hi / lo);
    }
    println!(
        "acceptance 05 point-count scaling: PASS (ratio spreads {:.3} / {:.3} / {:.3})",
        spreads[0], spreads[1], spreads[2]
    );
}

#[test]
fn acceptance_06_spline_exactness_and_decay() {
    // rho*sqrt(omega) sits at the contraction edge 1/2: slow enough decay
    // that all four errors stay above the floating-point floor, making the
    // monotonicity comparison meaningful.
    let circle = Manifold::circle();
    let lat = Lattice::build(circle, 0.5, 7).unwrap();
    let cutoff = SplineModel::recommended_cutoff(&lat);
    let model = SplineModel::lagrangian_basis(&lat, 2, cutoff).unwrap();
    let rule = model.weights().unwrap();

    // Random elements of the Lagrangian span integrate through the spline
    // weights; the oracle is again the constant coefficient.
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut a: Vec<f64> = (0..lat.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut a {
            *x /= norm;
        }
        let coeffs = model.coefficients() * DVector::from_column_slice(&a);
        let g = SpectralFunction::new(circle, cutoff, coeffs.iter().cloned().collect()).unwrap();
        let exact = g.coefficients()[0] * circle.volume().sqrt();
        let got = rule.integrate(&g.synthesize(lat.points())).unwrap();
        worst = worst.max((got - exact).abs());
    }
    assert!(worst <= 1e-9, "spline-span integration error {worst}");

    // Error decay in the smoothing order for a smooth integrand, inside the
    // contraction regime rho*sqrt(omega) <= 1/2. Each extra order contracts
    // the error by 3+ decades, so the chain reaches the f64 roundoff floor by
    // k = 3; below that floor ordering is noise, hence the 1e-12 allowance.
    let f = SpectralFunction::new(circle, 1.0, vec![0.4, 1.0, -0.3]).unwrap();
    let table = SplineModel::error_decay(&lat, &f, &[1, 2, 3, 4], cutoff).unwrap();
    assert!(table.contracting, "rho*sqrt(omega) = {}", table.rho_sqrt_omega);
    assert!(
        table.rows[1].err < table.rows[0].err,
        "no decay above the roundoff floor: {:?}",
        table.rows
    );
    for pair in table.rows.windows(2) {
        assert!(
            pair[1].err <= pair[0].err * (1.0 + 1e-9) + 1e-12,
            "decay not monotone: {:?}",
            table.rows
        );
    }
    let drop = table.rows[3].err / table.rows[0].err;
    assert!(drop <= 0.1, "err(4)/err(1) = {drop}");
    println!(
        "acceptance 06 spline quadrature: PASS (span error {worst:.2e}, \
         err4/err1 {drop:.4})"
    );
}

#[test]
fn acceptance_07_products_stay_band_limited() {
    let cases = [
        (Manifold::circle(), 4.0),
        (Manifold::torus(), 2.0),
        (Manifold::sphere(), 6.5),
    ];
    let mut worst = 0.0f64;
    for (manifold, omega) in cases {
        let bound = 4.0 * manifold.group_dim() as f64 * omega;
        let mut rng = ChaCha8Rng::seed_from_u64(700);
        for _ in 0..50 {
            let f = SpectralFunction::random(manifold, omega, &mut rng);
            let g = SpectralFunction::random(manifold, omega, &mut rng);
            let report = product_bandlimit_check(&f, &g, 1.5 * bound).unwrap();
            assert!(
                report.max_leakage <= 1e-10,
                "{:?} leakage {}",
                manifold.kind(),
                report.max_leakage
            );
            worst = worst.max(report.max_leakage);
        }
    }

    // cos * cos lands exactly on the guaranteed band edge 4*d*omega = 4.
    let circle = Manifold::circle();
    let cos = SpectralFunction::new(circle, 1.0, vec![0.0, PI.sqrt(), 0.0]).unwrap();
    let report = product_bandlimit_check(&cos, &cos, 24.0).unwrap();
    assert_eq!(report.bound, 4.0);
    assert!(
        (report.empirical_cutoff - 4.0).abs() <= 1e-12,
        "cos*cos cutoff {}",
        report.empirical_cutoff
    );
    println!(
        "acceptance 07 product band limit: PASS (worst leakage over 150 pairs \
         {worst:.2e}, cos*cos cutoff {})",
        report.empirical_cutoff
    );
}

#[test]
fn acceptance_08_discrete_fourier_transform() {
    let circle = Manifold::circle();
    let torus = Manifold::torus();
    let sphere = Manifold::sphere();

    // Per manifold: a rule exact on E_{4*d*omega} recovers coefficients of
    // random f in E_omega from samples alone.
    let lat_c = equispaced_circle(32);
    let lat_t = Lattice::build(torus, 0.35, 6).unwrap();
    let lat_s = Lattice::build(sphere, 0.11, 1).unwrap();
    let cases = [
        (circle, lat_c, 16.0, 4.0),
        (torus, lat_t, 32.0, 2.0),
        (sphere, lat_s, 24.0, 2.0),
    ];
    let mut worst = 0.0f64;
    for (manifold, lat, rule_omega, omega) in &cases {
        let rule = CubatureRule::exact_weights(&SamplingMatrix::build(lat, *rule_omega)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(800);
        let mut worst_here = 0.0f64;
        for _ in 0..20 {
            let f = SpectralFunction::random(*manifold, *omega, &mut rng);
            let samples = f.synthesize(lat.points());
            let g = discrete_fourier_transform(&rule, &samples, *omega).unwrap();
            worst_here = worst_here.max(max_abs_diff(f.coefficients(), g.coefficients()));
        }
        assert!(
            worst_here <= 1e-8,
            "{:?} recovery error {worst_here}",
            manifold.kind()
        );
        worst = worst.max(worst_here);
    }

    // Negative control: a rule certified only on E_4 must refuse omega = 4
    // requests (the integrands live in E_16), and bypassing the guard with
    // naive coefficient sums is genuinely wrong on an irregular lattice.
    let bad = Lattice::build(circle, 0.9, 5).unwrap();
    let bad_rule = CubatureRule::exact_weights(&SamplingMatrix::build(&bad, 4.0)).unwrap();
    let f = SpectralFunction::new(circle, 4.0, vec![0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
    let samples = f.synthesize(bad.points());
    match discrete_fourier_transform(&bad_rule, &samples, 4.0) {
        Err(Error::InsufficientExactness { have, need }) => {
            assert_eq!(need, 16.0);
            assert!(have < need);
        }
        other => panic!("expected InsufficientExactness, got {other:?}"),
    }
    let mut control = 0.0f64;
    for (j, mode) in circle.eigen_basis(4.0).iter().enumerate() {
        let c: f64 = bad
            .points()
            .iter()
            .zip(bad_rule.weights())
            .zip(&samples)
            .map(|((p, w), s)| w * s * mode.eval(p))
            .sum();
        control = control.max((c - f.coefficients()[j]).abs());
    }
    assert!(control > 1e-4, "negative control too accurate: {control}");
    println!(
        "acceptance 08 discrete Fourier transform: PASS (worst recovery \
         {worst:.2e}, negative control error {control:.2e})"
    );
}

#[test]
fn acceptance_09_error_tracks_coefficient_decay() {
    // Cosine coefficients decaying like lambda^{-alpha} make the cubature
    // error of rules exact on E_omega decay like omega^{-alpha}; the fitted
    // log-log slope should recover alpha.
    let circle = Manifold::circle();
    let m_max = 2000u32;
    let omegas = [4.0f64, 16.0, 64.0, 256.0];
    let mut fitted = Vec::new();
    for alpha in [1.0f64, 2.0] {
        let mut coefficients = vec![0.0f64; 2 * m_max as usize + 1];
        for m in 1..=m_max {
            let lambda = (m as f64) * (m as f64);
            coefficients[2 * m as usize - 1] = lambda.powf(-alpha);
        }
        let cutoff = (m_max as f64) * (m_max as f64);
        let f = SpectralFunction::new(circle, cutoff, coefficients).unwrap();

        let mut samples_fit = Vec::new();
        for omega in omegas {
            let n = (4.0 * PI * omega.sqrt()).floor() as usize;
            let lat = equispaced_circle(n);
            let rule = CubatureRule::exact_weights(&SamplingMatrix::build(&lat, omega)).unwrap();
            // The integral of f is zero: everything measured is aliasing of
            // the out-of-band tail.
            let err = rule.integrate(&f.synthesize(lat.points())).unwrap().abs();
            assert!(err > 1e-13, "error at omega {omega} fell into roundoff");
            samples_fit.push((omega.ln(), err.ln()));
        }
        let p = -least_squares_slope(&samples_fit);
        assert!((p - alpha).abs() <= 0.3, "alpha {alpha}: fitted decay {p}");
        fitted.push(p);
    }
    println!(
        "acceptance 09 coefficient-decay rates: PASS (fitted {:.3} for alpha 1, \
         {:.3} for alpha 2)",
        fitted[0], fitted[1]
    );
}

#[test]
fn acceptance_10_bernstein_equality_and_derivative_identity() {
    // Single eigenfunctions attain the Bernstein bound exactly.
    let singles = [
        (Manifold::circle(), 9.0),
        (Manifold::torus(), 5.0),
        (Manifold::sphere(), 12.0),
    ];
    for (manifold, lambda) in singles {
        let dim = manifold.band_dimension(lambda);
        let mut coefficients = vec![0.0; dim];
        coefficients[dim - 1] = 1.0;
        let f = SpectralFunction::new(manifold, lambda, coefficients).unwrap();
        for s in [0.5, 1.0, 2.0] {
            let report = f.bernstein_check(lambda, s).unwrap();
            assert!(
                (report.ratio - 1.0).abs() <= 1e-12,
                "{:?} s = {s}: ratio {}",
                manifold.kind(),
                report.ratio
            );
        }
    }

    // Coordinate-derivative sums match spectral Laplacian powers on the torus.
    let torus = Manifold::torus();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let f = SpectralFunction::random(torus, 8.0, &mut rng);
        for s in [1, 2] {
            let residual = derivative_identity_check(&f, s).unwrap();
            assert!(residual <= 1e-10, "s = {s}: residual {residual}");
            worst = worst.max(residual);
        }
    }
    println!(
        "acceptance 10 sharpness identities: PASS (worst derivative residual \
         {worst:.2e})"
    );
}
