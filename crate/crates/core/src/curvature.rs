// SPDX-License-Identifier: Apache-2.0

//! Radial and tangential curvatures of the natural parameterization.
//!
//! The second derivative is expanded in the moving frame,
//! `r'' = -rho r + tau r'`, and the shifted tangent in the same frame,
//! `r'(phi(s)) = -Rho r + Tau r'`. Both 2x2 systems are solved by Cramer's
//! rule in the biorthogonal coordinates of the norm's basis.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{solve_in_frame, Vec2};
use crate::norm::{Norm2D, NormConstants};
use crate::richardson::extrapolate_pair;
use crate::sphere_param::{phase_shift, NaturalCurve, PhaseShift};

/// Default step of the second difference.
pub const DEFAULT_SECOND_DIFF_STEP: f64 = 5e-3;
/// Frames with `|det(r, r')|` below this are rejected.
pub const MIN_FRAME_DET: f64 = 1e-12;
/// Half-width (in `s`) of the bands excluded around singular directions.
pub const SINGULAR_BAND: f64 = 1e-3;

/// `r''(s)` from central second differences at `h` and `h / 2`, combined by
/// one Richardson step.
pub fn second_derivative(curve: &NaturalCurve, s: f64, h: f64) -> Result<Vec2> {
    if !(1e-7..=1e-2).contains(&h) {
        return Err(Error::InvalidParameter(format!(
            "second-difference step must lie in [1e-7, 1e-2], got {h}"
        )));
    }
    let r0 = curve.point(s);
    let d2 = |k: f64| (1.0 / (k * k)) * (curve.point(s + k) - 2.0 * r0 + curve.point(s - k));
    let coarse = d2(h);
    let fine = d2(0.5 * h);
    Ok(Vec2::new(
        extrapolate_pair(h, coarse.x, 0.5 * h, fine.x, 2),
        extrapolate_pair(h, coarse.y, 0.5 * h, fine.y, 2),
    ))
}

/// Coefficients `(alpha, beta)` of `w = -alpha u + beta v` in basis
/// coordinates.
fn frame_solve(norm: &Norm2D, s: f64, u: Vec2, v: Vec2, w: Vec2) -> Result<(f64, f64)> {
    let basis = norm.basis();
    let c = |x: Vec2| -> Vec2 {
        let (a, b) = basis.coords(x);
        Vec2::new(a, b)
    };
    let (cu, cv) = (c(u), c(v));
    match solve_in_frame(cu, cv, c(w), MIN_FRAME_DET) {
        Some((a, b)) => Ok((-a, b)),
        None => Err(Error::SingularFrame {
            s,
            det: cu.cross(cv),
        }),
    }
}

/// Step to use at `s`, shrunk near the curve's singular parameters.
fn local_step(curve: &NaturalCurve, s: f64, h: f64) -> f64 {
    let period = 2.0 * curve.half_length();
    let mut step = h;
    for sing in curve.singular_parameters() {
        let d = (s - sing).rem_euclid(period);
        let d = d.min(period - d);
        step = step.min(0.5 * d);
    }
    step.max(1e-7)
}

/// `(rho(s), tau(s))` with the default second-difference step.
pub fn curvatures_at(curve: &NaturalCurve, s: f64) -> Result<(f64, f64)> {
    curvatures_with_step(curve, s, DEFAULT_SECOND_DIFF_STEP)
}

pub fn curvatures_with_step(curve: &NaturalCurve, s: f64, h: f64) -> Result<(f64, f64)> {
    let h = local_step(curve, s, h);
    let (r, dr) = curve.point_and_derivative(s);
    let ddr = second_derivative(curve, s, h)?;
    frame_solve(curve.norm(), s, r, dr, ddr)
}

/// `(Rho(s), Tau(s))` from the phase shift.
pub fn supercurvatures_at(
    curve: &NaturalCurve,
    phase: &PhaseShift<'_>,
    s: f64,
) -> Result<(f64, f64)> {
    let phi = phase.phi(s)?;
    supercurvatures_from_phi(curve, s, phi)
}

fn supercurvatures_from_phi(curve: &NaturalCurve, s: f64, phi: f64) -> Result<(f64, f64)> {
    let (r, dr) = curve.point_and_derivative(s);
    let shifted = curve.derivative(phi);
    frame_solve(curve.norm(), s, r, dr, shifted)
}

/// Tabulated radial and tangential curvature.
#[derive(Debug, Clone)]
pub struct CurvatureProfile {
    pub s: Vec<f64>,
    pub rho: Vec<f64>,
    pub tau: Vec<f64>,
    pub half_length: f64,
    /// Grid size before singular bands were removed.
    pub nominal_grid: usize,
    /// Excluded intervals `(lo, hi)` around singular parameters.
    pub excluded: Vec<(f64, f64)>,
}

/// Tabulated supercurvatures on the same grid as a [`CurvatureProfile`].
#[derive(Debug, Clone)]
pub struct SuperCurvature {
    pub s: Vec<f64>,
    pub phi: Vec<f64>,
    pub big_rho: Vec<f64>,
    pub big_tau: Vec<f64>,
    pub psi: Vec<f64>,
    pub constants: NormConstants,
}

/// `psi(s) = Tau(s) / Rho(s)` at the grid point nearest to `s` (modulo `2L`
/// when the grid is a full period), by linear interpolation.
pub fn quotient_curvature(sup: &SuperCurvature, s: f64) -> f64 {
    interpolate(&sup.s, &sup.psi, s)
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.iter().position(|&v| v >= x) {
        Some(0) => ys[0],
        None => ys[ys.len() - 1],
        Some(i) => {
            let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            ys[i - 1] + w * (ys[i] - ys[i - 1])
        }
    }
}

/// Trapezoid integral of tabulated values over `[0, L)` treating the data as
/// `L`-periodic; points of `[L, 2L)` are ignored.
pub fn half_period_integral(s: &[f64], f: &[f64], half_length: f64) -> f64 {
    let pts: Vec<(f64, f64)> = s
        .iter()
        .zip(f)
        .filter(|(x, _)| **x < half_length)
        .map(|(x, y)| (*x, *y))
        .collect();
    if pts.is_empty() {
        return 0.0;
    }
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
    }
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    acc + 0.5 * (first.0 + half_length - last.0) * (first.1 + last.1)
}

impl CurvatureProfile {
    /// Descriptions of every violated invariant; empty for a sound profile.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some((s, r)) = self.s.iter().zip(&self.rho).find(|(_, r)| !(**r >= -1e-9)) {
            out.push(format!("rho({s}) = {r:e} is negative"));
        }
        let l = self.half_length;
        let mut lookup = std::collections::HashMap::new();
        let key = |x: f64| (x / l * self.nominal_grid as f64 * 0.5).round() as i64;
        for (i, &s) in self.s.iter().enumerate() {
            lookup.insert(key(s), i);
        }
        for (i, &s) in self.s.iter().enumerate() {
            if s >= l {
                break;
            }
            if let Some(&j) = lookup.get(&key(s + l)) {
                let dr = (self.rho[i] - self.rho[j]).abs();
                let dt = (self.tau[i] - self.tau[j]).abs();
                if dr > 1e-8 || dt > 1e-8 {
                    out.push(format!(
                        "periodicity fails at s = {s}: drho = {dr:e}, dtau = {dt:e}"
                    ));
                    break;
                }
            }
        }
        let int_rho = half_period_integral(&self.s, &self.rho, l);
        if !(int_rho > 0.0) {
            out.push(format!("integral of rho over a half period is {int_rho:e}"));
        }
        let int_tau = half_period_integral(&self.s, &self.tau, l);
        if int_tau.abs() > 1e-6 * l {
            out.push(format!("integral of tau over a half period is {int_tau:e}"));
        }
        out
    }
}

impl SuperCurvature {
    /// Descriptions of every violated bound; empty when all hold.
    pub fn violations(&self) -> Vec<String> {
        let ratio = self.constants.tangential_ratio();
        let lower = self.constants.radial_super_lower();
        let mut out = Vec::new();
        for i in 0..self.s.len() {
            let (rr, tt) = (self.big_rho[i], self.big_tau[i]);
            if tt.abs() > ratio * rr.abs() + 1e-9 {
                out.push(format!("|Tau| exceeds the bound at s = {}", self.s[i]));
                break;
            }
            if rr.abs() < lower - 1e-9 {
                out.push(format!("|Rho| = {rr} below {lower} at s = {}", self.s[i]));
                break;
            }
        }
        out
    }
}

/// Uniform grid of `grid_size` points over `[0, 2L)` minus the singular bands.
pub fn profile_grid(curve: &NaturalCurve, grid_size: usize) -> (Vec<f64>, Vec<(f64, f64)>) {
    let period = 2.0 * curve.half_length();
    let sing = curve.singular_parameters();
    let excluded: Vec<(f64, f64)> = sing
        .iter()
        .map(|&c| (c - SINGULAR_BAND, c + SINGULAR_BAND))
        .collect();
    let grid = (0..grid_size)
        .map(|k| period * k as f64 / grid_size as f64)
        .filter(|&s| {
            sing.iter().all(|&c| {
                let d = (s - c).rem_euclid(period);
                d.min(period - d) > SINGULAR_BAND
            })
        })
        .collect();
    (grid, excluded)
}

/// Evaluates both profiles of `norm` on a `grid_size`-point grid, in
/// parallel.
pub fn build_profile(
    norm: &Norm2D,
    grid_size: usize,
) -> Result<(CurvatureProfile, SuperCurvature)> {
    let curve = NaturalCurve::build(norm)?;
    profile_of_curve(&curve, grid_size)
}

pub fn profile_of_curve(
    curve: &NaturalCurve,
    grid_size: usize,
) -> Result<(CurvatureProfile, SuperCurvature)> {
    if grid_size < 256 {
        return Err(Error::InvalidParameter(format!(
            "curvature grid must have at least 256 points, got {grid_size}"
        )));
    }
    let grid_size = grid_size + grid_size % 2;
    let (s, excluded) = profile_grid(curve, grid_size);
    let rows: Vec<(f64, f64, f64, f64, f64)> = s
        .par_iter()
        .map(|&si| {
            let (rho, tau) = curvatures_at(curve, si)?;
            let phi = phase_shift(curve, si)?;
            let (big_rho, big_tau) = supercurvatures_from_phi(curve, si, phi)?;
            Ok((rho, tau, phi, big_rho, big_tau))
        })
        .collect::<Result<_>>()?;
    let profile = CurvatureProfile {
        s: s.clone(),
        rho: rows.iter().map(|r| r.0).collect(),
        tau: rows.iter().map(|r| r.1).collect(),
        half_length: curve.half_length(),
        nominal_grid: grid_size,
        excluded,
    };
    let sup = SuperCurvature {
        s,
        phi: rows.iter().map(|r| r.2).collect(),
        big_rho: rows.iter().map(|r| r.3).collect(),
        big_tau: rows.iter().map(|r| r.4).collect(),
        psi: rows.iter().map(|r| r.4 / r.3).collect(),
        constants: curve.constants(),
    };
    Ok((profile, sup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::make_lp_norm;
    use crate::sphere_param::{polar_derivative, polar_point};

    fn l4_curve() -> NaturalCurve {
        NaturalCurve::build(&make_lp_norm(4.0).unwrap()).unwrap()
    }

    #[test]
    fn euclidean_second_derivative() {
        let c = NaturalCurve::new(&Norm2D::euclidean(), 512).unwrap();
        let d = second_derivative(&c, 0.0, DEFAULT_SECOND_DIFF_STEP).unwrap();
        assert!((d.x + 1.0).abs() < 1e-9 && d.y.abs() < 1e-9);
        for k in 0..16 {
            let s = 0.4 * k as f64;
            let d = second_derivative(&c, s, DEFAULT_SECOND_DIFF_STEP).unwrap();
            assert!((d.coord_len() - 1.0).abs() < 1e-9);
        }
        assert!(second_derivative(&c, 0.0, 0.1).is_err());
    }

    #[test]
    fn l4_second_derivative_matches_chain_rule() {
        let curve = l4_curve();
        let norm = curve.norm().clone();
        // r'' = (1/|p'|) d/dt (p' / |p'|), with p'' from a fourth-order
        // difference of the analytic p'.
        let h = 1e-4;
        let dp = |t: f64| polar_derivative(&norm, t);
        for t in [0.0, 0.3, 0.7, 1.2] {
            let ddp = (1.0 / (12.0 * h))
                * (dp(t - 2.0 * h) - 8.0 * dp(t - h) + 8.0 * dp(t + h) - dp(t + 2.0 * h));
            let p1 = dp(t);
            let n = norm.eval(p1);
            let g = norm.grad(p1).unwrap();
            let oracle = (1.0 / n) * ((1.0 / n) * ddp - (g.apply(ddp) / (n * n)) * p1);
            let s = curve.table().arc_length_at(t);
            let got = second_derivative(&curve, s, DEFAULT_SECOND_DIFF_STEP).unwrap();
            let scale = oracle.coord_len().max(1e-3);
            assert!(
                (got - oracle).coord_len() <= 1e-5 * scale,
                "t = {t}: {got:?} vs {oracle:?}"
            );
            assert!((polar_point(&norm, t) - curve.point(s)).coord_len() < 1e-14);
        }
    }

    #[test]
    fn euclidean_curvatures_any_frame() {
        for angle in [0.0, 0.4, 2.2] {
            let rot = crate::linalg::Mat2::rotation(angle);
            let norm = Norm2D::euclidean()
                .with_basis(rot * Vec2::new(1.0, 0.0), rot * Vec2::new(0.0, 1.0))
                .unwrap();
            let c = NaturalCurve::new(&norm, 512).unwrap();
            let ph = PhaseShift::new(&c);
            for k in 0..12 {
                let s = 0.5 * k as f64;
                let (rho, tau) = curvatures_at(&c, s).unwrap();
                assert!((rho - 1.0).abs() < 1e-8 && tau.abs() < 1e-8, "{rho} {tau}");
                let (rr, tt) = supercurvatures_at(&c, &ph, s).unwrap();
                assert!((rr - 1.0).abs() < 1e-9 && tt.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn l4_axis_symmetry() {
        let c = l4_curve();
        let (rho, tau) = curvatures_at(&c, 0.0).unwrap();
        assert!(tau.abs() < 1e-8);
        assert!(rho.abs() < 1e-6);
        let (rr, tt) = supercurvatures_at(&c, &PhaseShift::new(&c), 0.0).unwrap();
        assert!(tt.abs() < 1e-9);
        assert!(rr > 0.0);
    }

    #[test]
    fn euclidean_profile() {
        let (p, sup) = build_profile(&Norm2D::euclidean(), 512).unwrap();
        assert_eq!(p.s.len(), 512);
        assert!(p.rho.iter().all(|r| (r - 1.0).abs() < 1e-8));
        assert!(p.tau.iter().all(|t| t.abs() < 1e-8));
        assert!(sup.psi.iter().all(|x| x.abs() < 1e-9));
        assert!(p.violations().is_empty());
        assert!(sup.violations().is_empty());
        assert!(quotient_curvature(&sup, 1.0).abs() < 1e-9);
    }

    #[test]
    fn l4_profile_invariants() {
        let (p, sup) = build_profile(&make_lp_norm(4.0).unwrap(), 1024).unwrap();
        assert!(p.violations().is_empty(), "{:?}", p.violations());
        assert!(sup.violations().is_empty(), "{:?}", sup.violations());
        let max_dev = p.rho.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
        assert!(max_dev > 0.1);
        assert!(sup.big_rho.iter().all(|&r| r > 0.0));
        let l = p.half_length;
        let n = p.s.len();
        for i in 0..n / 2 {
            assert!((sup.psi[i] - sup.psi[i + n / 2]).abs() < 1e-7);
            assert!((p.s[i + n / 2] - p.s[i] - l).abs() < 1e-12);
        }
    }

    #[test]
    fn lp_profiles_approach_round_as_p_tends_to_two() {
        let devs: Vec<f64> = [2.5, 2.1, 2.01]
            .iter()
            .map(|&p| {
                let (prof, _) = build_profile(&make_lp_norm(p).unwrap(), 256).unwrap();
                prof.rho.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max)
            })
            .collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
    }

    #[test]
    fn lp_below_two_excludes_axis_bands() {
        let curve = NaturalCurve::build(&make_lp_norm(1.5).unwrap()).unwrap();
        let (grid, excluded) = profile_grid(&curve, 4096);
        assert_eq!(excluded.len(), 4);
        assert!(grid.len() < 4096);
        assert!(grid.iter().all(|&s| s.abs() > SINGULAR_BAND));
        let (p, _) = profile_of_curve(&curve, 512).unwrap();
        assert!(p.rho.iter().all(|&r| r >= -1e-9));
    }

    #[test]
    fn half_period_integral_of_constant() {
        let s: Vec<f64> = (0..10).map(|k| k as f64 * 0.2).collect();
        let f = vec![3.0; 10];
        assert!((half_period_integral(&s, &f, 1.0) - 3.0).abs() < 1e-14);
    }
}
