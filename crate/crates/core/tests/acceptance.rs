// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use spherekit::curvature::{build_profile, curvatures_at};
use spherekit::estimator::{
    estimate_profile, estimate_psi_prime, estimate_psi_prime_uncorrected, estimate_rho,
    EstimatorOptions, RhoTable, DEFAULT_SCHEDULE,
};
use spherekit::intrinsic::{
    dijkstra_distance, intrinsic_distance, random_pairs, verify_natural_isometry, SampledArc,
    EPS_FACTOR,
};
use spherekit::invariants::check_invariants;
use spherekit::norm::make_radial_norm_with_derivative;
use spherekit::reconstruct::{
    random_well_conditioned_map, round_trip, tingley_check, TingleyOptions,
};
use spherekit::{make_lp_norm, CurveOracle, Error, NaturalCurve, Norm2D, Smoothness};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn l4() -> Norm2D {
    make_lp_norm(4.0).unwrap()
}

fn l4_curve() -> NaturalCurve {
    NaturalCurve::build(&l4()).unwrap()
}

/// Unit ball `x^4 + y^4 + x^2 y^2 <= 1` rotated by 0.3 rad.
fn rotated_quartic() -> Norm2D {
    let g = |u: f64| {
        let (s, c) = u.sin_cos();
        c.powi(4) + s.powi(4) + c * c * s * s
    };
    make_radial_norm_with_derivative(
        move |t| g(t - 0.3).powf(-0.25),
        move |t| {
            let u = t - 0.3;
            -0.25 * g(u).powf(-1.25) * (-0.5 * (4.0 * u).sin())
        },
        Smoothness::C2,
        "rotated quartic",
    )
    .unwrap()
}

fn timed(limit: Duration, start: Instant, detail: String) -> Outcome {
    let t = start.elapsed();
    if t < limit {
        Ok(format!("{detail}, {:.2} s", t.as_secs_f64()))
    } else {
        Err(format!(
            "{detail}, took {:.2} s (limit {:.0} s)",
            t.as_secs_f64(),
            limit.as_secs_f64()
        ))
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hilbert_baseline() -> Outcome {
    let start = Instant::now();
    let (profile, _) = build_profile(&Norm2D::euclidean(), 512).map_err(|e| e.to_string())?;
    let d_rho = profile
        .rho
        .iter()
        .map(|r| (r - 1.0).abs())
        .fold(0.0, f64::max);
    let d_tau = profile.tau.iter().map(|t| t.abs()).fold(0.0, f64::max);
    let d_l = (profile.half_length - std::f64::consts::PI).abs();
    let detail = format!("max|rho-1| = {d_rho:.2e}, max|tau| = {d_tau:.2e}, |L-pi| = {d_l:.2e}");
    check(
        d_rho <= 1e-8 && d_tau <= 1e-8 && d_l <= 1e-8,
        detail.clone(),
    )?;
    timed(Duration::from_secs(1), start, detail)
}

fn rho_recovery() -> Outcome {
    let start = Instant::now();
    let curve = l4_curve();
    let l = curve.half_length();
    let oracle = CurveOracle::new(curve.clone());
    let mut worst: f64 = 0.0;
    for k in 0..256 {
        let s = 2.0 * l * (k as f64 + 0.37) / 256.0;
        let (rho, _) = curvatures_at(&curve, s).map_err(|e| e.to_string())?;
        let est = estimate_rho(&oracle, s, &DEFAULT_SCHEDULE).map_err(|e| e.to_string())?;
        let err = if rho > 0.1 {
            (est - rho).abs() / rho
        } else {
            (est - rho).abs()
        };
        worst = worst.max(err);
    }
    let detail = format!("max error {worst:.2e} over 256 points");
    check(worst <= 1e-2, detail.clone())?;
    timed(Duration::from_secs(10), start, detail)
}

fn third_factor() -> Outcome {
    let curve = NaturalCurve::new(&Norm2D::euclidean(), 512).unwrap();
    let oracle = CurveOracle::new(curve);
    let opts = EstimatorOptions::default();
    let table = RhoTable::estimate(&oracle, 256, &opts.schedule).map_err(|e| e.to_string())?;
    let mut corrected: f64 = 0.0;
    let mut uncorrected = f64::INFINITY;
    for k in 0..64 {
        let s = 2.0 * std::f64::consts::PI * (k as f64 + 0.21) / 64.0;
        let (_, v) = estimate_psi_prime(&oracle, &table, s, &opts).map_err(|e| e.to_string())?;
        corrected = corrected.max(v.abs());
        let u = estimate_psi_prime_uncorrected(&oracle, &table, s, &opts.schedule)
            .map_err(|e| e.to_string())?;
        uncorrected = uncorrected.min(u.abs());
    }
    check(
        corrected <= 1e-3 && uncorrected > 0.5,
        format!(
            "max|psi'| = {corrected:.2e} with the factor 3, min|psi'| = {uncorrected:.3} without"
        ),
    )
}

fn tau_recovery() -> Outcome {
    let start = Instant::now();
    let curve = l4_curve();
    let l = curve.half_length();
    let est = estimate_profile(
        &CurveOracle::new(curve.clone()),
        &EstimatorOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let mut err: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for (i, &s) in est.s.iter().enumerate() {
        let (_, tau) = curvatures_at(&curve, s).map_err(|e| e.to_string())?;
        err = err.max((est.tau_hat[i] - tau).abs());
        peak = peak.max(tau.abs());
    }
    let trap = |f: &[f64]| -> f64 {
        est.s
            .windows(2)
            .zip(f.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    };
    let int_tau = trap(&est.tau_hat);
    let int_rho = trap(&est.rho_hat);
    let detail = format!(
        "max|tau_hat - tau| = {err:.2e} (bound {:.2e}), |int tau_hat| = {:.2e}, int rho_hat = {int_rho:.4}",
        5e-2 * peak,
        int_tau.abs()
    );
    check(
        err <= 5e-2 * peak && int_tau.abs() <= 1e-4 * l && int_rho > 0.0,
        detail.clone(),
    )?;
    timed(Duration::from_secs(30), start, detail)
}

fn round_trip_check() -> Outcome {
    let curve = l4_curve();
    let l = curve.half_length();
    let (profile, _) = build_profile(&l4(), 4096).map_err(|e| e.to_string())?;
    let (rec, dev) = round_trip(&curve, &profile, 1e-4 * l).map_err(|e| e.to_string())?;
    let (_, coarse) = round_trip(&curve, &profile, l / 64.0).map_err(|e| e.to_string())?;
    let (_, fine) = round_trip(&curve, &profile, l / 128.0).map_err(|e| e.to_string())?;
    let ratio = coarse / fine;
    check(
        dev <= 1e-5 && rec.antipodal_residual <= 1e-6 && ratio >= 12.0,
        format!(
            "deviation {dev:.2e}, antipodal {:.2e}, error ratio {ratio:.1} for steps L/64 -> L/128",
            rec.antipodal_residual
        ),
    )
}

fn tingley_pipeline() -> Outcome {
    let x = l4();
    let mut worst_f: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for seed in 0..5 {
        let a = random_well_conditioned_map(seed, 3.0);
        let y = x.linear_image(a).map_err(|e| e.to_string())?;
        let opts = TingleyOptions {
            reference: Some(a),
            ..TingleyOptions::default()
        };
        let basis = x.basis();
        let report =
            tingley_check(&x, &y, a * basis.e1, a * basis.e2, &opts).map_err(|e| e.to_string())?;
        worst_f = worst_f.max(report.reference_deviation.unwrap_or(f64::INFINITY));
        worst_res = worst_res.max(report.max_sphere_residual);
    }
    let e = Norm2D::euclidean();
    let negative = tingley_check(
        &x,
        &e,
        e.basis().e1,
        e.basis().e2,
        &TingleyOptions::default(),
    );
    let rejected = matches!(negative, Err(Error::CurvatureMismatch { .. }));
    check(
        worst_f <= 1e-3 && worst_res <= 1e-4 && rejected,
        format!(
            "5 maps: max|F - A| = {worst_f:.2e}, sphere residual {worst_res:.2e}; l4 vs euclidean {}",
            if rejected { "rejected" } else { "NOT rejected" }
        ),
    )
}

fn invariant_suite() -> Outcome {
    let norms = [
        Norm2D::euclidean(),
        make_lp_norm(3.0).unwrap(),
        l4(),
        make_lp_norm(6.0).unwrap(),
        rotated_quartic(),
    ];
    let mut failures = Vec::new();
    for norm in &norms {
        let curve = NaturalCurve::build(norm).map_err(|e| e.to_string())?;
        for v in check_invariants(&curve, 1024).map_err(|e| e.to_string())? {
            failures.push(format!("{}: {v}", norm.label()));
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} norms, 1024-point grids, no violations", norms.len())
        } else {
            failures.join("; ")
        },
    )
}

fn intrinsic_metric() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut gap: f64 = 0.0;
    for norm in [Norm2D::euclidean(), l4()] {
        let curve = NaturalCurve::build(&norm).map_err(|e| e.to_string())?;
        let l = curve.half_length();
        let pairs = random_pairs(2024, 64, l);
        for &(a, b) in &pairs {
            let r = verify_natural_isometry(&curve, a, b, 6).map_err(|e| e.to_string())?;
            worst = worst.max(r.residual);
        }
        for &(a, b) in pairs.iter().take(8) {
            let arc = SampledArc::from_curve(&curve, a.min(b), a.max(b), 1024)
                .map_err(|e| e.to_string())?;
            let eps = EPS_FACTOR * arc.max_step_chord();
            let n = arc.len() - 1;
            let chain = intrinsic_distance(&arc, 0, n, eps)
                .map_err(|e| e.to_string())?
                .d_eps;
            let graph = dijkstra_distance(&arc, 0, n, eps).map_err(|e| e.to_string())?;
            gap = gap.max((chain - graph).abs());
        }
    }
    check(
        worst <= 1e-4 && gap <= 1e-9,
        format!("max residual {worst:.2e} over 128 pairs, shortest path vs chain {gap:.2e} on 1025 samples"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 hilbert baseline", hilbert_baseline),
        ("2 distance-only rho", rho_recovery),
        ("3 factor-three pin", third_factor),
        ("4 tau recovery", tau_recovery),
        ("5 reconstruction round trip", round_trip_check),
        ("6 isometry extension", tingley_pipeline),
        ("7 invariant suite", invariant_suite),
        ("8 intrinsic metric", intrinsic_metric),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
