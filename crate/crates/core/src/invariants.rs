// SPDX-License-Identifier: Apache-2.0

//! The inequalities and identities every smooth sphere satisfies, checked on
//! sample grids.

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::curvature::profile_of_curve;
use crate::error::Result;
use crate::sphere_param::{polar_point, polar_speed, NaturalCurve, PhaseShift, PHASE_RESIDUAL_TOL};

/// Slack added to every inequality.
pub const SLACK: f64 = 1e-9;

/// Lipschitz offsets probed at every grid point.
const LIPSCHITZ_EPS: [f64; 6] = [1e-3, 1e-2, 0.1, 0.3, 0.7, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

/// Every check of [`check_invariants`], in order.
pub const CHECKS: [&str; 12] = [
    "lipschitz_sandwich",
    "polar_speed_bounds",
    "arc_length_shift",
    "unit_speed",
    "antipodal",
    "non_expanding",
    "phase_identity",
    "phase_monotone",
    "phase_shift_period",
    "profile",
    "supercurvature_bounds",
    "psi_period",
];

struct Collector(Vec<Violation>);

impl Collector {
    fn fail(&mut self, check: &'static str, detail: String) {
        if !self.0.iter().any(|v| v.check == check) {
            self.0.push(Violation { check, detail });
        }
    }
}

/// Runs the invariant suite on `grid` points of the curve and returns the
/// first violation of each failing check.
pub fn check_invariants(curve: &NaturalCurve, grid: usize) -> Result<Vec<Violation>> {
    let norm = curve.norm();
    let k = curve.constants();
    let (c, big_c) = (k.c, k.big_c);
    let l = curve.half_length();
    let table = curve.table();
    let mut out = Collector(Vec::new());

    for i in 0..grid {
        let t = TAU * i as f64 / grid as f64;
        let p = polar_point(norm, t);
        for eps in LIPSCHITZ_EPS {
            let d = norm.eval(polar_point(norm, t + eps) - p);
            let lo = c / big_c * eps.sin().abs();
            let hi = 4.0 * big_c * big_c / (c * c) * (eps / 2.0).sin().abs();
            if d < lo - SLACK || d > hi + SLACK {
                out.fail(
                    "lipschitz_sandwich",
                    format!("t = {t}, eps = {eps}: {d} not in [{lo}, {hi}]"),
                );
            }
        }
        let v = polar_speed(norm, t);
        if v < k.polar_speed_lower() - SLACK || v > k.polar_speed_upper() + SLACK {
            out.fail("polar_speed_bounds", format!("speed {v} at t = {t}"));
        }
        if t < PI {
            let gap = table.arc_length_at(t + PI) - table.arc_length_at(t) - l;
            if gap.abs() > SLACK {
                out.fail(
                    "arc_length_shift",
                    format!("s(t + pi) - s(t) - L = {gap:e} at t = {t}"),
                );
            }
        }
    }

    let phase = PhaseShift::new(curve);
    let mut phis = Vec::with_capacity(grid);
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..grid {
        let s = 2.0 * l * i as f64 / grid as f64;
        let (r, d) = curve.point_and_derivative(s);
        let speed = norm.eval(d);
        if (speed - 1.0).abs() > SLACK {
            out.fail("unit_speed", format!("|r'({s})| = {speed}"));
        }
        let anti = norm.eval(curve.point(s + l) + r);
        if anti > SLACK {
            out.fail(
                "antipodal",
                format!("|r(s + L) + r(s)| = {anti:e} at s = {s}"),
            );
        }
        if let Some((s0, _)) = prev {
            let r0 = curve.point(s0);
            let chord = norm.eval(r - r0);
            if chord > (s - s0) + SLACK {
                out.fail("non_expanding", format!("chord {chord} over [{s0}, {s}]"));
            }
        }
        let far = (s + 0.37 * l) % (2.0 * l);
        let chord = norm.eval(curve.point(far) - r);
        if chord > 0.37 * l + SLACK {
            out.fail("non_expanding", format!("chord {chord} over [{s}, {far}]"));
        }
        let phi = phase.phi(s)?;
        let res = norm.eval(curve.point(phi) - d);
        if res > SLACK {
            out.fail(
                "phase_identity",
                format!("|r(phi) - r'| = {res:e} at s = {s}"),
            );
        }
        if let Some((_, phi0)) = prev {
            let mut step = phi - phi0;
            step -= 2.0 * l * ((step - l) / (2.0 * l)).ceil();
            if step < -SLACK {
                out.fail(
                    "phase_monotone",
                    format!("phi decreases by {step:e} before s = {s}"),
                );
            }
        }
        let shifted = phase.phi(s + l)?;
        let mut gap = shifted - phi - l;
        gap -= 2.0 * l * (gap / (2.0 * l)).round();
        if gap.abs() > 10.0 * PHASE_RESIDUAL_TOL {
            out.fail(
                "phase_shift_period",
                format!("phi(s + L) - phi(s) - L = {gap:e} at s = {s}"),
            );
        }
        phis.push(phi);
        prev = Some((s, phi));
    }

    let (profile, sup) = profile_of_curve(curve, grid)?;
    for v in profile.violations() {
        out.fail("profile", v);
    }
    for v in sup.violations() {
        out.fail("supercurvature_bounds", v);
    }
    let n = sup.s.len();
    for i in 0..n {
        if sup.s[i] >= l {
            break;
        }
        if let Some(j) = (i..n).find(|&j| (sup.s[j] - sup.s[i] - l).abs() < 1e-9 * l) {
            let gap = (sup.psi[i] - sup.psi[j]).abs();
            if gap > 1e-8 {
                out.fail(
                    "psi_period",
                    format!("|psi(s + L) - psi(s)| = {gap:e} at s = {}", sup.s[i]),
                );
            }
        }
    }
    Ok(out.0)
}
