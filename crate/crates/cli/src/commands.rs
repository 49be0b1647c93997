// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use spherekit::curvature::{curvatures_at, profile_of_curve};
use spherekit::estimator::{estimate_profile, EstimatorOptions, DEFAULT_ESTIMATE_GRID};
use spherekit::intrinsic::{
    dijkstra_distance, intrinsic_distance, random_pairs, verify_natural_isometry, SampledArc,
    EPS_FACTOR,
};
use spherekit::invariants::{check_invariants, CHECKS};
use spherekit::io::{self, fmt_f64, NormSpec, Table};
use spherekit::reconstruct::{
    integrate_sphere, profile_coefficients, random_well_conditioned_map, tingley_check,
    TingleyOptions, DEFAULT_STEP_FRACTION,
};
use spherekit::{
    CurveOracle, DistanceOracle, Error, Mat2, NaturalCurve, Norm2D, SampledOracle, Vec2,
};

use crate::svg;

/// Curvatures, distance-only estimators, reconstruction and isometry checks
/// for unit spheres of smooth normed planes.
#[derive(Debug, Parser)]
#[command(name = "spherekit", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Radial, tangential and super-curvature profile as CSV.
    Curvature(CurvatureArgs),
    /// Curvatures recovered from distances alone.
    Estimate(EstimateArgs),
    /// Integrate a curvature profile CSV back to a sphere.
    Reconstruct(ReconstructArgs),
    /// Extend a correspondence of unit vectors to a linear isometry.
    Tingley(TingleyArgs),
    /// Chain distances along random arcs against arc length.
    Intrinsic(IntrinsicArgs),
    /// Check the sphere inequalities and identities on a grid.
    Invariants(InvariantsArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance override `KEY=VALUE`, repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tol: Vec<String>,
}

#[derive(Debug, Args)]
struct CurvatureArgs {
    /// `euclidean`, `lp:P` or `@FILE`.
    #[arg(long)]
    norm: String,
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Plot of rho and tau.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Analytic norm used both as the oracle and for the comparison.
    #[arg(long, conflicts_with = "samples", required_unless_present = "samples")]
    norm: Option<String>,
    /// CSV of `s, r1, r2` samples of a natural parameterization.
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Comma-separated, strictly decreasing step schedule.
    #[arg(long, default_value = "1e-2,5e-3,2.5e-3")]
    eps: String,
    #[arg(long, default_value_t = DEFAULT_ESTIMATE_GRID)]
    grid: usize,
    /// Comparison table against the analytic curvatures (needs --norm).
    #[arg(long)]
    compare: Option<PathBuf>,
    /// Plot of the estimated and analytic curvatures (needs --norm).
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    /// Profile CSV written by `curvature`.
    #[arg(long)]
    profile: PathBuf,
    /// Norm of the true sphere, for the deviation report and the initial frame.
    #[arg(long)]
    norm: Option<String>,
    /// Step as a fraction of the half-length.
    #[arg(long, default_value_t = DEFAULT_STEP_FRACTION)]
    step: f64,
    /// Write every n-th state.
    #[arg(long, default_value_t = 10)]
    stride: usize,
    /// Report JSON path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Sphere overlay of the true and reconstructed curves.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TingleyArgs {
    #[arg(long)]
    norm_x: String,
    /// Target norm; the image of X under the map when omitted.
    #[arg(long)]
    norm_y: Option<String>,
    /// Map `[[a, b], [c, d]]`; its columns are the images of e1 and e2.
    #[arg(long, conflicts_with = "seed")]
    map: Option<String>,
    /// Draw the map at random with condition number at most 3.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 512)]
    grid: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct IntrinsicArgs {
    #[arg(long)]
    norm: String,
    #[arg(long, default_value_t = 64)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dyadic refinement levels.
    #[arg(long, default_value_t = 6)]
    levels: u32,
    /// Also compare with the shortest path on arcs of this many segments.
    #[arg(long)]
    dijkstra: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct InvariantsArgs {
    #[arg(long)]
    norm: String,
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Violations(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Violations(_) => 3,
            CliError::Core(e) => match e {
                Error::InvalidParameter(_)
                | Error::InvalidBasis(_)
                | Error::DegenerateNorm(_)
                | Error::NonConvexProfile(_)
                | Error::Parse(_)
                | Error::Io(_) => 2,
                Error::CurvatureMismatch { .. } | Error::ReflectionAmbiguity => 4,
                _ => 3,
            },
        }
    }

    pub fn to_json(&self) -> Value {
        let (class, message) = match self {
            CliError::Usage(m) => ("Usage", m.clone()),
            CliError::Violations(n) => {
                ("InvariantViolation", format!("{n} invariant checks failed"))
            }
            CliError::Core(e) => (e.class(), e.to_string()),
        };
        let mut v = json!({ "error": class, "message": message, "exit_code": self.exit_code() });
        match self {
            CliError::Core(Error::CurvatureMismatch {
                rho,
                tau,
                half_length,
            }) => {
                v["curvature_mismatch"] =
                    json!({ "rho": rho, "tau": tau, "half_length": half_length });
            }
            CliError::Core(Error::ScheduleTooCoarse { s, .. })
            | CliError::Core(Error::LevelOutOfRange { s, .. })
            | CliError::Core(Error::SingularFrame { s, .. })
            | CliError::Core(Error::PhaseNotFound { s, .. })
            | CliError::Core(Error::BlowUp { s, .. }) => {
                v["s"] = json!(s);
            }
            _ => {}
        }
        v
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Curvature(a) => curvature(a),
        Command::Estimate(a) => estimate(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Tingley(a) => tingley(a),
        Command::Intrinsic(a) => intrinsic(a),
        Command::Invariants(a) => invariants(a),
    }
}

fn parse_norm(field: &str, text: &str) -> CliResult<(NormSpec, Norm2D)> {
    let spec = NormSpec::parse(text).map_err(|e| CliError::usage(format!("{field}: {e}")))?;
    let norm = spec.build()?;
    Ok((spec, norm))
}

fn tolerances(tol: &[String], allowed: &[&str]) -> CliResult<Vec<(String, f64)>> {
    tol.iter()
        .map(|t| {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("--tol: expected KEY=VALUE, got {t:?}")))?;
            if !allowed.contains(&k) {
                return Err(CliError::usage(format!(
                    "--tol: unknown key {k:?}; expected one of {}",
                    allowed.join(", ")
                )));
            }
            let v: f64 = v
                .parse()
                .ok()
                .filter(|v: &f64| *v > 0.0 && v.is_finite())
                .ok_or_else(|| {
                    CliError::usage(format!("--tol {k}: expected a positive number, got {v:?}"))
                })?;
            Ok((k.to_string(), v))
        })
        .collect()
}

fn check_grid(field: &str, n: usize, min: usize) -> CliResult<()> {
    if n < min {
        return Err(CliError::usage(format!(
            "{field}: must be at least {min}, got {n}"
        )));
    }
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => {
            fs::write(p, bytes).map_err(|e| Error::Io(format!("{}: {e}", p.display())).into())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(bytes).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Error::Io(e.to_string()).into())
                }
                _ => Ok(()),
            }
        }
    }
}

fn emit_json(out: Option<&Path>, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    emit(out, text.as_bytes())
}

fn write_svg(path: &Path, content: String) -> CliResult<()> {
    fs::write(path, content).map_err(|e| Error::Io(format!("{}: {e}", path.display())).into())
}

fn pair(v: Vec2) -> String {
    format!("{},{}", fmt_f64(v.x), fmt_f64(v.y))
}

fn parse_pair(field: &str, text: &str) -> CliResult<Vec2> {
    let v = io::parse_list(text)?;
    if v.len() != 2 {
        return Err(CliError::usage(format!(
            "{field}: expected two numbers, got {text:?}"
        )));
    }
    Ok(Vec2::new(v[0], v[1]))
}

fn curvature(a: CurvatureArgs) -> CliResult<()> {
    tolerances(&a.common.tol, &[])?;
    check_grid("--grid", a.grid, 256)?;
    let (spec, norm) = parse_norm("--norm", &a.norm)?;
    let curve = NaturalCurve::build(&norm)?;
    let (profile, sup) = profile_of_curve(&curve, a.grid)?;
    let (r0, r0p) = curve.point_and_derivative(0.0);
    let table = io::curvature_table(&profile, &sup, &spec.label())
        .meta("r0", pair(r0))
        .meta("r0p", pair(r0p));
    emit(a.common.out.as_deref(), &table.to_bytes()?)?;
    if let Some(path) = &a.svg {
        let rho = svg::Series {
            label: "rho",
            points: profile
                .s
                .iter()
                .copied()
                .zip(profile.rho.iter().copied())
                .collect(),
        };
        let tau = svg::Series {
            label: "tau",
            points: profile
                .s
                .iter()
                .copied()
                .zip(profile.tau.iter().copied())
                .collect(),
        };
        write_svg(
            path,
            svg::plot(
                &format!("curvatures of {}", spec.label()),
                &[rho, tau],
                false,
            ),
        )?;
    }
    Ok(())
}

fn trapezoid(s: &[f64], f: &[f64]) -> f64 {
    s.windows(2)
        .zip(f.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

fn estimate(a: EstimateArgs) -> CliResult<()> {
    let schedule = io::parse_list(&a.eps).map_err(|e| CliError::usage(format!("--eps: {e}")))?;
    check_grid("--grid", a.grid, 16)?;
    let mut opts = EstimatorOptions {
        schedule: schedule.clone(),
        grid: a.grid,
        ..EstimatorOptions::default()
    };
    for (k, v) in tolerances(&a.common.tol, &["rho_threshold", "null", "probe"])? {
        match k.as_str() {
            "rho_threshold" => opts.rho_threshold = v,
            "null" => opts.null_tol = v,
            _ => opts.probe_eps = Some(v),
        }
    }
    let (label, oracle, curve): (String, Box<dyn DistanceOracle>, Option<NaturalCurve>) =
        match (&a.norm, &a.samples) {
            (Some(text), _) => {
                let (spec, norm) = parse_norm("--norm", text)?;
                let curve = NaturalCurve::build(&norm)?;
                (
                    spec.label(),
                    Box::new(CurveOracle::new(curve.clone())),
                    Some(curve),
                )
            }
            (None, Some(path)) => {
                let (samples, half) = io::read_samples(&Table::read(path)?)?;
                (
                    format!("samples:{}", path.display()),
                    Box::new(SampledOracle::new(&samples, half)?),
                    None,
                )
            }
            (None, None) => return Err(CliError::usage("one of --norm or --samples is required")),
        };
    if curve.is_none() && (a.compare.is_some() || a.svg.is_some()) {
        return Err(CliError::usage(
            "--compare and --svg need an analytic --norm",
        ));
    }
    let est = estimate_profile(oracle.as_ref(), &opts)?;
    let l = est.half_length;
    let table = io::estimate_table(&est, &label, &schedule);
    let mut summary = json!({
        "norm": label,
        "half_length": l,
        "grid": est.s.len() - 1,
        "eps": schedule,
        "tau_integral": trapezoid(&est.s, &est.tau_hat),
        "rho_integral": trapezoid(&est.s, &est.rho_hat),
        "psi0": est.psi_hat[0],
        "max_abs_psi_prime": est.psi_prime_hat.iter().map(|v| v.abs()).fold(0.0, f64::max),
    });
    if let Some(curve) = &curve {
        let mut cmp = Table::new(&[
            "s", "rho_hat", "rho", "rho_err", "tau_hat", "tau", "tau_err",
        ])
        .meta("norm", &label)
        .meta("half_length", fmt_f64(l));
        let mut rho_err: f64 = 0.0;
        let mut tau_err: f64 = 0.0;
        let mut tau_max: f64 = 0.0;
        let mut truth = Vec::with_capacity(est.s.len());
        for (i, &s) in est.s.iter().enumerate() {
            let Ok((rho, tau)) = curvatures_at(curve, s) else {
                truth.push((s, f64::NAN, f64::NAN));
                continue;
            };
            let e_rho = if rho > 0.1 {
                (est.rho_hat[i] - rho).abs() / rho
            } else {
                (est.rho_hat[i] - rho).abs()
            };
            let e_tau = (est.tau_hat[i] - tau).abs();
            rho_err = rho_err.max(e_rho);
            tau_err = tau_err.max(e_tau);
            tau_max = tau_max.max(tau.abs());
            cmp.push_floats(&[s, est.rho_hat[i], rho, e_rho, est.tau_hat[i], tau, e_tau]);
            truth.push((s, rho, tau));
        }
        summary["max_rho_error"] = json!(rho_err);
        summary["max_tau_error"] = json!(tau_err);
        summary["max_abs_tau"] = json!(tau_max);
        if let Some(p) = &a.compare {
            cmp.write(p)?;
        }
        if let Some(p) = &a.svg {
            let series = [
                svg::Series {
                    label: "rho",
                    points: truth.iter().map(|t| (t.0, t.1)).collect(),
                },
                svg::Series {
                    label: "tau",
                    points: truth.iter().map(|t| (t.0, t.2)).collect(),
                },
                svg::Series {
                    label: "rho_hat",
                    points: est
                        .s
                        .iter()
                        .copied()
                        .zip(est.rho_hat.iter().copied())
                        .collect(),
                },
                svg::Series {
                    label: "tau_hat",
                    points: est
                        .s
                        .iter()
                        .copied()
                        .zip(est.tau_hat.iter().copied())
                        .collect(),
                },
            ];
            write_svg(
                p,
                svg::plot(&format!("estimated curvatures of {label}"), &series, false),
            )?;
        }
    }
    match &a.common.out {
        Some(p) => {
            table.write(p)?;
            emit_json(None, &summary)
        }
        None => emit(None, &table.to_bytes()?),
    }
}

fn reconstruct(a: ReconstructArgs) -> CliResult<()> {
    tolerances(&a.common.tol, &[])?;
    if !(a.step > 0.0 && a.step <= 0.5) {
        return Err(CliError::usage(format!(
            "--step: must lie in (0, 0.5], got {}",
            a.step
        )));
    }
    if a.stride == 0 {
        return Err(CliError::usage("--stride: must be positive"));
    }
    let table = Table::read(&a.profile)?;
    let profile = io::read_curvature_table(&table)?;
    let l = profile.half_length;
    let curve = match &a.norm {
        Some(text) => Some(NaturalCurve::build(&parse_norm("--norm", text)?.1)?),
        None => None,
    };
    let (r0, r0p) = match (
        &curve,
        table.metadata_value("r0"),
        table.metadata_value("r0p"),
    ) {
        (Some(c), _, _) => c.point_and_derivative(0.0),
        (None, Some(p), Some(q)) => (parse_pair("r0", p)?, parse_pair("r0p", q)?),
        _ => {
            return Err(CliError::usage(
                "initial frame unknown: pass --norm or a profile with r0/r0p metadata",
            ))
        }
    };
    let (rho, tau) = profile_coefficients(&profile)?;
    let rec = integrate_sphere(
        &|s| rho.eval(s),
        &|s| tau.eval(s),
        r0,
        r0p,
        l,
        2.0 * l,
        a.step * l,
    )?;
    let mut report = json!({
        "half_length": l,
        "step": rec.step,
        "steps": rec.states.len() - 1,
        "antipodal_residual": rec.antipodal_residual,
        "periodic_residual": rec.periodic_residual,
    });
    if let Some(c) = &curve {
        let dev = rec
            .states
            .iter()
            .map(|st| c.norm().eval(st.r - c.point(st.s)))
            .fold(0.0, f64::max);
        report["max_deviation"] = json!(dev);
        if (c.half_length() - l).abs() > 1e-6 * l {
            report["half_length_mismatch"] = json!(c.half_length() - l);
        }
    }
    emit(
        a.common.out.as_deref(),
        &io::curve_table(&rec, a.stride).to_bytes()?,
    )?;
    if let Some(p) = &a.svg {
        let mut series = vec![svg::Series {
            label: "reconstructed",
            points: rec
                .states
                .iter()
                .step_by(a.stride)
                .map(|st| (st.r.x, st.r.y))
                .collect(),
        }];
        if let Some(c) = &curve {
            series.insert(
                0,
                svg::Series {
                    label: "true sphere",
                    points: (0..=512)
                        .map(|k| {
                            let r = c.point(2.0 * l * k as f64 / 512.0);
                            (r.x, r.y)
                        })
                        .collect(),
                },
            );
        }
        write_svg(p, svg::plot("unit sphere", &series, true))?;
    }
    if a.report.is_some() || a.common.out.is_some() {
        emit_json(a.report.as_deref(), &report)?;
    }
    Ok(())
}

fn tingley(a: TingleyArgs) -> CliResult<()> {
    check_grid("--grid", a.grid, 16)?;
    let mut opts = TingleyOptions {
        curvature_grid: a.grid,
        ..TingleyOptions::default()
    };
    for (k, v) in tolerances(&a.common.tol, &["rho", "tau", "length"])? {
        match k.as_str() {
            "rho" => opts.rho_tol = v,
            "tau" => opts.tau_tol = v,
            _ => opts.length_tol = v,
        }
    }
    let (_, norm_x) = parse_norm("--norm-x", &a.norm_x)?;
    let map = match (&a.map, a.seed) {
        (Some(m), _) => {
            Some(io::parse_matrix(m).map_err(|e| CliError::usage(format!("--map: {e}")))?)
        }
        (None, Some(seed)) => Some(random_well_conditioned_map(seed, 3.0)),
        (None, None) => None,
    };
    let (norm_y, m) = match &a.norm_y {
        Some(text) => (
            parse_norm("--norm-y", text)?.1,
            map.unwrap_or(Mat2::IDENTITY),
        ),
        None => {
            let m = map.ok_or_else(|| CliError::usage("--norm-y, --map or --seed is required"))?;
            (norm_x.linear_image(m)?, m)
        }
    };
    if a.norm_y.is_none() {
        opts.reference = Some(m);
    }
    let e = norm_x.basis();
    let report = tingley_check(&norm_x, &norm_y, m * e.e1, m * e.e2, &opts)?;
    let mut v = io::isometry_json(&report);
    v["map"] = json!(m.rows());
    emit_json(a.common.out.as_deref(), &v)
}

fn intrinsic(a: IntrinsicArgs) -> CliResult<()> {
    tolerances(&a.common.tol, &[])?;
    if a.pairs == 0 {
        return Err(CliError::usage("--pairs: must be positive"));
    }
    let (spec, norm) = parse_norm("--norm", &a.norm)?;
    let curve = NaturalCurve::build(&norm)?;
    let l = curve.half_length();
    let mut header = vec!["a", "b", "d", "residual", "converged"];
    if a.dijkstra.is_some() {
        header.push("dijkstra_gap");
    }
    let mut table = Table::new(&header)
        .meta("norm", spec.label())
        .meta("half_length", fmt_f64(l))
        .meta("levels", a.levels)
        .meta("seed", a.seed);
    let mut max_res: f64 = 0.0;
    let mut max_gap: f64 = 0.0;
    let mut all_converged = true;
    for (x, y) in random_pairs(a.seed, a.pairs, l) {
        let check = verify_natural_isometry(&curve, x, y, a.levels)?;
        max_res = max_res.max(check.residual);
        all_converged &= check.converged;
        let mut row = vec![
            fmt_f64(x),
            fmt_f64(y),
            fmt_f64(*check.distances.last().unwrap_or(&0.0)),
            fmt_f64(check.residual),
            check.converged.to_string(),
        ];
        if let Some(segments) = a.dijkstra {
            let gap = if x == y {
                0.0
            } else {
                let arc = SampledArc::from_curve(&curve, x.min(y), x.max(y), segments)?;
                let eps = EPS_FACTOR * arc.max_step_chord();
                let n = arc.len() - 1;
                (intrinsic_distance(&arc, 0, n, eps)?.d_eps - dijkstra_distance(&arc, 0, n, eps)?)
                    .abs()
            };
            max_gap = max_gap.max(gap);
            row.push(fmt_f64(gap));
        }
        table.push(row);
    }
    let mut summary = json!({
        "norm": spec.label(),
        "pairs": a.pairs,
        "max_residual": max_res,
        "all_converged": all_converged,
    });
    if a.dijkstra.is_some() {
        summary["max_dijkstra_gap"] = json!(max_gap);
    }
    match &a.common.out {
        Some(p) => {
            table.write(p)?;
            emit_json(None, &summary)
        }
        None => emit(None, &table.to_bytes()?),
    }
}

fn invariants(a: InvariantsArgs) -> CliResult<()> {
    tolerances(&a.common.tol, &[])?;
    check_grid("--grid", a.grid, 256)?;
    let (spec, norm) = parse_norm("--norm", &a.norm)?;
    let curve = NaturalCurve::build(&norm)?;
    let violations = check_invariants(&curve, a.grid)?;
    let report = json!({
        "norm": spec.label(),
        "grid": a.grid,
        "checks": CHECKS,
        "violations": violations
            .iter()
            .map(|v| json!({ "check": v.check, "detail": v.detail }))
            .collect::<Vec<_>>(),
    });
    emit_json(a.common.out.as_deref(), &report)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violations(violations.len()))
    }
}
