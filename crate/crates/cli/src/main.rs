//! Command line front end: build lattices and cubature rules, verify saved
//! artifacts, run discrete Fourier transforms and emit sweep tables.
//!
//! Artifacts are UTF-8 JSON (plus the binary spline sidecar) and every
//! command writes to `--output` or stdout, so runs compose through files.
//! Exit codes: 0 on success, 1 when a verification or transform fails,
//! 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use bandlimit::homogeneous::{discrete_fourier_transform, product_bandlimit_check, product_bound};
use bandlimit::{
    CubatureRule, Error, Lattice, Manifold, SamplingMatrix, SpectralFunction, SplineModel,
};

#[derive(Parser)]
#[command(
    name = "bandlimit",
    version,
    about = "Sampling lattices, cubature and Fourier transforms for \
             band-limited functions on the circle, torus and sphere"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a maximal rho-lattice and write it as JSON.
    #[command(group(ArgGroup::new("density").required(true).args(["rho", "omega"])))]
    Lattice {
        /// Manifold: circle, torus2 or sphere2.
        #[arg(long, value_parser = parse_manifold)]
        manifold: Manifold,
        /// Mesh norm; nodes end up rho/2-separated and rho/2-dense.
        #[arg(long)]
        rho: Option<f64>,
        /// Band cutoff; sets rho = c0 / sqrt(omega) together with --c0.
        #[arg(long, requires = "c0")]
        omega: Option<f64>,
        /// Density constant for --omega.
        #[arg(long, conflicts_with = "rho")]
        c0: Option<f64>,
        /// Candidate-shuffle seed; 0 keeps the natural sweep order.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Compute cubature weights for a saved lattice.
    #[command(group(ArgGroup::new("mode").args(["exact", "positive", "spline"])))]
    Weights {
        /// Lattice JSON produced by `lattice`.
        #[arg(long)]
        lattice: PathBuf,
        /// Exactness cutoff of the rule.
        #[arg(long, required_unless_present = "spline")]
        omega: Option<f64>,
        /// Minimal-norm exact weights (the default).
        #[arg(long)]
        exact: bool,
        /// Voronoi-corrected positive exact weights.
        #[arg(long)]
        positive: bool,
        /// Variational spline weights of the given smoothing order.
        #[arg(long, value_name = "K")]
        spline: Option<u32>,
        /// Quadrature resolution for the Voronoi measures (--positive).
        #[arg(long)]
        resolution: Option<usize>,
        /// Eigenbasis truncation for --spline; defaults to the recommended value.
        #[arg(long)]
        cutoff: Option<f64>,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Check saved artifacts and write a pass/fail report with the
    /// measured constants.
    #[command(group(
        ArgGroup::new("artifact")
            .required(true)
            .multiple(true)
            .args(["lattice", "rule", "function", "spline"])
    ))]
    Verify {
        /// Lattice JSON: re-certifies separation and covering.
        #[arg(long)]
        lattice: Option<PathBuf>,
        /// Cubature rule JSON: weight sum, exactness, positivity, frame bounds.
        #[arg(long)]
        rule: Option<PathBuf>,
        /// Function JSON: Bernstein inequality and product leakage.
        #[arg(long)]
        function: Option<PathBuf>,
        /// Spline model JSON: interpolation residual.
        #[arg(long)]
        spline: Option<PathBuf>,
        /// Tolerance for residual checks.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Report path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Recover spectral coefficients from samples at the rule nodes.
    Dft {
        /// Cubature rule JSON; must be exact on the product band.
        #[arg(long)]
        rule: PathBuf,
        /// Function JSON to sample and transform.
        #[arg(long)]
        function: PathBuf,
        /// Analysis cutoff; defaults to the function's own cutoff.
        #[arg(long)]
        omega: Option<f64>,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Fit the Lagrangian spline basis on a lattice and save the model
    /// with its coefficient sidecar.
    Spline {
        /// Lattice JSON produced by `lattice`.
        #[arg(long)]
        lattice: PathBuf,
        /// Smoothing order.
        #[arg(long)]
        k: u32,
        /// Eigenbasis truncation; defaults to the recommended value.
        #[arg(long)]
        cutoff: Option<f64>,
        /// Model JSON path; the `.splm` sidecar lands next to it.
        #[arg(short, long)]
        output: PathBuf,
    },

    /// Tabulate point counts, frame bounds and optional spline error
    /// decay across band cutoffs as CSV.
    Sweep {
        /// Manifold: circle, torus2 or sphere2.
        #[arg(long, value_parser = parse_manifold)]
        manifold: Manifold,
        /// Band cutoffs, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        omegas: Vec<f64>,
        /// Lattice density constant: rho = c0 / sqrt(omega).
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        /// Candidate-shuffle seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Spline orders for error-decay columns, comma separated.
        #[arg(long, value_delimiter = ',', requires = "function")]
        ks: Vec<u32>,
        /// Integrand JSON for the decay columns.
        #[arg(long, requires = "ks")]
        function: Option<PathBuf>,
        /// Eigenbasis truncation for the decay columns.
        #[arg(long)]
        cutoff: Option<f64>,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_manifold(s: &str) -> Result<Manifold, String> {
    match s {
        "circle" | "s1" => Ok(Manifold::circle()),
        "torus2" | "torus" | "t2" => Ok(Manifold::torus()),
        "sphere2" | "sphere" | "s2" => Ok(Manifold::sphere()),
        other => Err(format!(
            "unknown manifold {other:?} (expected circle, torus2 or sphere2)"
        )),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> bandlimit::Result<ExitCode> {
    match command {
        Command::Lattice {
            manifold,
            rho,
            omega,
            c0,
            seed,
            output,
        } => cmd_lattice(manifold, rho, omega, c0, seed, output.as_deref()),
        Command::Weights {
            lattice,
            omega,
            exact: _,
            positive,
            spline,
            resolution,
            cutoff,
            output,
        } => cmd_weights(
            &lattice,
            omega,
            positive,
            spline,
            resolution,
            cutoff,
            output.as_deref(),
        ),
        Command::Verify {
            lattice,
            rule,
            function,
            spline,
            tol,
            output,
        } => cmd_verify(lattice, rule, function, spline, tol, output.as_deref()),
        Command::Dft {
            rule,
            function,
            omega,
            output,
        } => cmd_dft(&rule, &function, omega, output.as_deref()),
        Command::Spline {
            lattice,
            k,
            cutoff,
            output,
        } => cmd_spline(&lattice, k, cutoff, &output),
        Command::Sweep {
            manifold,
            omegas,
            c0,
            seed,
            ks,
            function,
            cutoff,
            output,
        } => cmd_sweep(manifold, &omegas, c0, seed, &ks, function, cutoff, output.as_deref()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> bandlimit::Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn write_json<T: Serialize>(value: &T, output: Option<&Path>) -> bandlimit::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(&text, output)
}

fn write_text(text: &str, output: Option<&Path>) -> bandlimit::Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_lattice(
    manifold: Manifold,
    rho: Option<f64>,
    omega: Option<f64>,
    c0: Option<f64>,
    seed: u64,
    output: Option<&Path>,
) -> bandlimit::Result<ExitCode> {
    let rho = match (rho, omega, c0) {
        (Some(rho), _, _) => rho,
        (None, Some(omega), Some(c0)) => c0 / omega.sqrt(),
        _ => unreachable!("clap enforces --rho or --omega with --c0"),
    };
    let lattice = Lattice::build(manifold, rho, seed)?;
    eprintln!(
        "lattice: {} nodes on {} at rho = {}",
        lattice.len(),
        manifold.kind(),
        lattice.rho()
    );
    write_json(&lattice, output)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_weights(
    lattice: &Path,
    omega: Option<f64>,
    positive: bool,
    spline: Option<u32>,
    resolution: Option<usize>,
    cutoff: Option<f64>,
    output: Option<&Path>,
) -> bandlimit::Result<ExitCode> {
    let lattice: Lattice = read_json(lattice)?;
    let rule = if let Some(k) = spline {
        let cutoff = cutoff.unwrap_or_else(|| SplineModel::recommended_cutoff(&lattice));
        SplineModel::lagrangian_basis(&lattice, k, cutoff)?.weights()?
    } else {
        let omega = omega.expect("clap requires --omega without --spline");
        let matrix = SamplingMatrix::build(&lattice, omega);
        if positive {
            let resolution =
                resolution.unwrap_or_else(|| lattice.recommended_voronoi_resolution());
            CubatureRule::positive_weights(&matrix, &lattice.voronoi_measures(resolution))?
        } else {
            CubatureRule::exact_weights(&matrix)?
        }
    };
    eprintln!(
        "weights: {:?} rule on {} nodes, exactness residual {:.3e}",
        rule.construction(),
        rule.len(),
        rule.exactness_residual()
    );
    write_json(&rule, output)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    details: serde_json::Value,
}

#[derive(Serialize)]
struct Report {
    passed: bool,
    checks: Vec<Check>,
}

fn cmd_verify(
    lattice: Option<PathBuf>,
    rule: Option<PathBuf>,
    function: Option<PathBuf>,
    spline: Option<PathBuf>,
    tol: f64,
    output: Option<&Path>,
) -> bandlimit::Result<ExitCode> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut checks = Vec::new();
    if let Some(path) = lattice {
        let lattice: Lattice = read_json(&path)?;
        checks.push(lattice_certificate(&lattice));
    }
    if let Some(path) = rule {
        let rule: CubatureRule = read_json(&path)?;
        checks.extend(rule_checks(&rule, tol));
    }
    if let Some(path) = function {
        let f: SpectralFunction = read_json(&path)?;
        checks.extend(function_checks(&f, tol)?);
    }
    if let Some(path) = spline {
        checks.push(spline_check(&SplineModel::load(&path)?, tol));
    }
    let passed = checks.iter().all(|check| check.passed);
    eprintln!(
        "verify: {} ({}/{} checks passed)",
        if passed { "PASS" } else { "FAIL" },
        checks.iter().filter(|check| check.passed).count(),
        checks.len()
    );
    write_json(&Report { passed, checks }, output)?;
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

/// Re-runs the separation / covering certificate at the recommended probe
/// density and reports the measured lattice constants.
fn lattice_certificate(lattice: &Lattice) -> Check {
    match lattice.verify(lattice.recommended_probe_density()) {
        Ok(report) => Check {
            name: "lattice_certificate",
            passed: true,
            details: json!({
                "rho": lattice.rho(),
                "point_count": report.point_count,
                "min_separation": report.min_separation,
                "covering_radius": report.covering_radius,
                "multiplicity": report.multiplicity,
            }),
        },
        Err(err) => Check {
            name: "lattice_certificate",
            passed: false,
            details: json!({ "error": err.to_string() }),
        },
    }
}

fn rule_checks(rule: &CubatureRule, tol: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    let volume = rule.manifold().volume();
    let sum: f64 = rule.weights().iter().sum();
    checks.push(Check {
        name: "weight_sum",
        passed: (sum - volume).abs() <= 1e-10,
        details: json!({ "sum": sum, "volume": volume, "error": (sum - volume).abs() }),
    });

    let residual = rule.exactness_residual();
    checks.push(Check {
        name: "exactness_residual",
        passed: residual <= tol,
        details: json!({ "residual": residual, "omega": rule.omega(), "nodes": rule.len() }),
    });

    let min_weight = rule.weights().iter().cloned().fold(f64::INFINITY, f64::min);
    let max_weight = rule
        .weights()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if rule.positive() {
        checks.push(Check {
            name: "positivity",
            passed: min_weight > 0.0,
            details: json!({ "min_weight": min_weight, "max_weight": max_weight }),
        });
    }

    // The weight envelope w/rho^n; for positive rules both ends must stay
    // strictly above zero.
    let scale = rule.lattice().rho().powi(rule.manifold().dim() as i32);
    checks.push(Check {
        name: "weight_envelope",
        passed: max_weight.is_finite() && (!rule.positive() || min_weight > 0.0),
        details: json!({
            "c1": min_weight / scale,
            "c2": max_weight / scale,
            "rho": rule.lattice().rho(),
        }),
    });

    if rule.omega() > 0.0 {
        let bounds = SamplingMatrix::build(rule.lattice(), rule.omega()).frame_bounds();
        checks.push(Check {
            name: "frame_bounds",
            passed: bounds.a > 0.0 && bounds.condition.is_finite(),
            details: serde_json::to_value(bounds).unwrap_or_default(),
        });
    }
    checks
}

fn function_checks(f: &SpectralFunction, tol: f64) -> bandlimit::Result<Vec<Check>> {
    let mut checks = Vec::new();
    let bernstein = f.bernstein_check(f.cutoff(), 1.0)?;
    checks.push(Check {
        name: "bernstein",
        passed: bernstein.lhs <= bernstein.bound * (1.0 + 1e-12),
        details: serde_json::to_value(bernstein)?,
    });

    let product = product_bandlimit_check(f, f, 1.5 * product_bound(f.manifold(), f.cutoff()))?;
    checks.push(Check {
        name: "product_leakage",
        passed: product.max_leakage <= tol,
        details: serde_json::to_value(product)?,
    });
    Ok(checks)
}

fn spline_check(model: &SplineModel, tol: f64) -> Check {
    let residual = model.interpolation_residual();
    Check {
        name: "spline_interpolation",
        passed: residual <= tol,
        details: json!({
            "order": model.order(),
            "cutoff": model.cutoff(),
            "nodes": model.lattice().len(),
            "residual": residual,
        }),
    }
}

fn cmd_dft(
    rule: &Path,
    function: &Path,
    omega: Option<f64>,
    output: Option<&Path>,
) -> bandlimit::Result<ExitCode> {
    let rule: CubatureRule = read_json(rule)?;
    let f: SpectralFunction = read_json(function)?;
    if f.manifold() != rule.manifold() {
        return Err(Error::InvalidParameter(
            "function and rule live on different manifolds".into(),
        ));
    }
    let omega = omega.unwrap_or_else(|| f.cutoff());
    if omega < f.cutoff() {
        return Err(Error::InvalidParameter(format!(
            "analysis cutoff {omega} is below the function cutoff {}",
            f.cutoff()
        )));
    }
    let samples = f.synthesize(rule.lattice().points());
    match discrete_fourier_transform(&rule, &samples, omega) {
        Ok(recovered) => {
            eprintln!(
                "dft: recovered {} coefficients at cutoff {omega}",
                recovered.coefficients().len()
            );
            write_json(&recovered, output)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(Error::InsufficientExactness { have, need }) => {
            let message = Error::InsufficientExactness { have, need }.to_string();
            eprintln!("dft: {message}");
            write_json(
                &json!({
                    "error": "InsufficientExactness",
                    "have": have,
                    "need": need,
                    "message": message,
                }),
                output,
            )?;
            Ok(ExitCode::FAILURE)
        }
        Err(err) => Err(err),
    }
}

fn cmd_spline(
    lattice: &Path,
    k: u32,
    cutoff: Option<f64>,
    output: &Path,
) -> bandlimit::Result<ExitCode> {
    let lattice: Lattice = read_json(lattice)?;
    let cutoff = cutoff.unwrap_or_else(|| SplineModel::recommended_cutoff(&lattice));
    let model = SplineModel::lagrangian_basis(&lattice, k, cutoff)?;
    model.save(output)?;
    eprintln!(
        "spline: order {k}, cutoff {cutoff}, interpolation residual {:.3e}",
        model.interpolation_residual()
    );
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    manifold: Manifold,
    omegas: &[f64],
    c0: f64,
    seed: u64,
    ks: &[u32],
    function: Option<PathBuf>,
    cutoff: Option<f64>,
    output: Option<&Path>,
) -> bandlimit::Result<ExitCode> {
    if !c0.is_finite() || c0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "c0 must be positive, got {c0}"
        )));
    }
    let f: Option<SpectralFunction> = match &function {
        Some(path) => Some(read_json(path)?),
        None => None,
    };
    if let Some(f) = &f {
        if f.manifold() != manifold {
            return Err(Error::InvalidParameter(
                "integrand lives on a different manifold".into(),
            ));
        }
    }

    let mut csv = String::from("omega,rho,point_count,ratio,A,B,condition");
    for k in ks {
        csv.push_str(&format!(",err_{k}"));
    }
    csv.push('\n');

    for &omega in omegas {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive, got {omega}"
            )));
        }
        let rho = c0 / omega.sqrt();
        let lattice = Lattice::build(manifold, rho, seed)?;
        let bounds = SamplingMatrix::build(&lattice, omega).frame_bounds();
        let ratio = lattice.len() as f64 / omega.powf(manifold.dim() as f64 / 2.0);
        csv.push_str(&format!(
            "{omega},{rho},{},{ratio},{},{},{}",
            lattice.len(),
            bounds.a,
            bounds.b,
            bounds.condition
        ));
        if let Some(f) = &f {
            let cutoff = cutoff.unwrap_or_else(|| SplineModel::recommended_cutoff(&lattice));
            let table = SplineModel::error_decay(&lattice, f, ks, cutoff)?;
            for row in &table.rows {
                csv.push_str(&format!(",{}", row.err));
            }
        }
        csv.push('\n');
    }
    eprintln!("sweep: {} rows on {}", omegas.len(), manifold.kind());
    write_text(&csv, output)?;
    Ok(ExitCode::SUCCESS)
}
