// SPDX-License-Identifier: Apache-2.0

//! Polar and natural (unit-speed) parameterizations of a unit sphere.
//!
//! The polar parameterization `p(t) = e^{it} / ||e^{it}||` projects the
//! auxiliary Euclidean circle radially onto the sphere. Its arc length
//! `s(t)`, measured in the norm itself, is tabulated once; the natural
//! parameterization is `r(s) = p(t(s))`, which has `||r'(s)|| = 1` and
//! `r(s + L) = -r(s)` where `L = s(pi)` is the half-length.
//!
//! Only the half table over `[0, pi]` is integrated: antipodal symmetry
//! gives `s(t + pi) = s(t) + L` exactly, and all queries are reduced modulo
//! `pi` (resp. `L`) before touching the table.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::linalg::Vec2;
use crate::norm::{norm_constants, Norm2D, NormConstants, DEFAULT_CONSTANTS_GRID};
use crate::quadrature::{adaptive_simpson, gauss_legendre_10};

/// Default number of t-samples over `[0, 2 pi]`.
pub const DEFAULT_TABLE_GRID: usize = 4096;
/// Local absolute error target of each Simpson panel.
pub const PANEL_TOL: f64 = 1e-10;
/// Maximum refinement depth of the adaptive quadrature.
pub const MAX_QUADRATURE_DEPTH: u32 = 30;
/// Acceptance threshold for the phase-shift residual.
pub const PHASE_RESIDUAL_TOL: f64 = 1e-8;

/// `p(t) = e^{it} / ||e^{it}||`.
pub fn polar_point(norm: &Norm2D, t: f64) -> Vec2 {
    let u = norm.basis().circle_point(t);
    (1.0 / norm.eval(u)) * u
}

/// `p'(t)`, by the quotient rule when the norm has a gradient and by a
/// fourth-order central difference otherwise.
pub fn polar_derivative(norm: &Norm2D, t: f64) -> Vec2 {
    let basis = norm.basis();
    let u = basis.circle_point(t);
    match norm.grad(u) {
        Some(g) => {
            let (s, c) = t.sin_cos();
            let du = basis.combine(-s, c);
            let n = norm.eval(u);
            (1.0 / n) * du - (g.apply(du) / (n * n)) * u
        }
        None => {
            let h = 1e-5;
            let f = |x: f64| polar_point(norm, x);
            (1.0 / (12.0 * h)) * (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h))
        }
    }
}

/// Speed `||p'(t)||` of the polar parameterization.
pub fn polar_speed(norm: &Norm2D, t: f64) -> f64 {
    norm.eval(polar_derivative(norm, t))
}

/// The polar parameterization of a norm's unit sphere.
#[derive(Debug, Clone)]
pub struct PolarCurve {
    norm: Norm2D,
}

impl PolarCurve {
    pub fn new(norm: Norm2D) -> Self {
        Self { norm }
    }

    pub fn norm(&self) -> &Norm2D {
        &self.norm
    }

    pub fn p(&self, t: f64) -> Vec2 {
        polar_point(&self.norm, t)
    }

    pub fn p_prime(&self, t: f64) -> Vec2 {
        polar_derivative(&self.norm, t)
    }
}

/// Tabulated arc length `s(t) = int_0^t ||p'(u)|| du`.
#[derive(Debug, Clone)]
pub struct ArcLengthTable {
    norm: Norm2D,
    /// Uniform knots over `[0, 2 pi]`.
    t_grid: Vec<f64>,
    /// `s(t_i)`.
    s_values: Vec<f64>,
    half_length: f64,
    step: f64,
    /// Simpson minus Gauss-Legendre panel integral, per half-table panel.
    panel_gap: Vec<f64>,
    inverse_seed: MonotoneCubic,
}

impl ArcLengthTable {
    pub fn norm(&self) -> &Norm2D {
        &self.norm
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn s_values(&self) -> &[f64] {
        &self.s_values
    }

    /// Half-length `L = s(pi)`.
    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    fn half_panels(&self) -> usize {
        self.panel_gap.len()
    }

    /// `s(t)` for any real `t`, continuing by `s(t + pi) = s(t) + L`.
    pub fn arc_length_at(&self, t: f64) -> f64 {
        let k = (t / PI).floor();
        let t0 = t - k * PI;
        let m = self.half_panels();
        let j = ((t0 / self.step).floor().max(0.0) as usize).min(m - 1);
        let tj = self.t_grid[j];
        let speed = |u: f64| polar_speed(&self.norm, u);
        let partial = gauss_legendre_10(&speed, tj, t0);
        let frac = (t0 - tj) / self.step;
        self.s_values[j] + partial + frac * self.panel_gap[j] + k * self.half_length
    }

    /// The parameter `t` with `s(t) = s`, for any real `s`.
    ///
    /// Bisection on the bracketing panel, seeded by the monotone interpolant
    /// of the inverse table and polished by Newton steps with derivative
    /// `||p'(t)||`.
    pub fn invert(&self, s: f64) -> f64 {
        let big_l = self.half_length;
        let k = (s / big_l).floor();
        let s0 = s - k * big_l;
        let m = self.half_panels();
        let half = &self.s_values[..=m];
        let j = match half.partition_point(|&v| v <= s0) {
            0 => 0,
            p => (p - 1).min(m - 1),
        };
        let mut lo = self.t_grid[j];
        let mut hi = self.t_grid[j + 1];
        let mut t = self.inverse_seed.eval(s0).clamp(lo, hi);
        for _ in 0..100 {
            let f = self.arc_length_at(t) - s0;
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                hi = hi.min(t);
            } else {
                lo = lo.max(t);
            }
            let mut next = t - f / polar_speed(&self.norm, t);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done =
                (next - t).abs() <= 2e-16 * t.abs().max(1.0) || hi - lo <= 4e-16 * t.abs().max(1.0);
            t = next;
            if done {
                break;
            }
        }
        t + k * PI
    }
}

/// Builds the arc-length table on `grid_size` uniform panels of `[0, 2 pi]`.
///
/// Each panel of `[0, pi]` is integrated by adaptive Simpson; the second
/// half follows from `s(t + pi) = s(t) + L`.
pub fn build_arc_length(norm: &Norm2D, grid_size: usize) -> Result<ArcLengthTable> {
    if grid_size < 256 {
        return Err(Error::InvalidParameter(format!(
            "arc-length grid must have at least 256 panels, got {grid_size}"
        )));
    }
    if !norm.smoothness().is_smooth() {
        return Err(Error::InvalidParameter(format!(
            "norm {} is not smooth",
            norm.label()
        )));
    }
    let n = grid_size + grid_size % 2;
    let m = n / 2;
    let step = PI / m as f64;
    let speed = |u: f64| polar_speed(norm, u);
    let mut s_half = Vec::with_capacity(m + 1);
    let mut gaps = Vec::with_capacity(m);
    s_half.push(0.0);
    let mut acc = 0.0;
    for j in 0..m {
        let a = step * j as f64;
        let b = step * (j + 1) as f64;
        let panel = adaptive_simpson(&speed, a, b, PANEL_TOL, MAX_QUADRATURE_DEPTH)?;
        gaps.push(panel - gauss_legendre_10(&speed, a, b));
        acc += panel;
        s_half.push(acc);
    }
    let half_length = acc;
    let t_grid: Vec<f64> = (0..=n).map(|i| step * i as f64).collect();
    let mut s_values = s_half.clone();
    s_values.extend((1..=m).map(|i| s_half[i] + half_length));
    s_values[n] = 2.0 * half_length;

    let seed_slopes: Vec<f64> = t_grid[..=m].iter().map(|&t| 1.0 / speed(t)).collect();
    let inverse_seed = MonotoneCubic::new(s_half, t_grid[..=m].to_vec(), Some(seed_slopes))?;
    Ok(ArcLengthTable {
        norm: norm.clone(),
        t_grid,
        s_values,
        half_length,
        step,
        panel_gap: gaps,
        inverse_seed,
    })
}

/// `t(s)`, the inverse of the arc-length map.
pub fn invert_arc_length(table: &ArcLengthTable, s: f64) -> f64 {
    table.invert(s)
}

/// The natural parameterization `r(s) = p(t(s))`.
#[derive(Debug, Clone)]
pub struct NaturalCurve {
    table: ArcLengthTable,
    constants: NormConstants,
}

impl NaturalCurve {
    /// Builds the arc-length table on `grid_size` panels and the comparison
    /// constants of the norm.
    pub fn new(norm: &Norm2D, grid_size: usize) -> Result<Self> {
        let table = build_arc_length(norm, grid_size)?;
        let constants = norm_constants(norm, DEFAULT_CONSTANTS_GRID)?;
        Ok(Self { table, constants })
    }

    /// Natural curve with the default table resolution.
    pub fn build(norm: &Norm2D) -> Result<Self> {
        Self::new(norm, DEFAULT_TABLE_GRID)
    }

    pub fn norm(&self) -> &Norm2D {
        self.table.norm()
    }

    pub fn table(&self) -> &ArcLengthTable {
        &self.table
    }

    pub fn constants(&self) -> NormConstants {
        self.constants
    }

    /// Half-length `L`.
    pub fn half_length(&self) -> f64 {
        self.table.half_length()
    }

    pub fn point(&self, s: f64) -> Vec2 {
        polar_point(self.norm(), self.table.invert(s))
    }

    pub fn derivative(&self, s: f64) -> Vec2 {
        let dp = polar_derivative(self.norm(), self.table.invert(s));
        (1.0 / self.norm().eval(dp)) * dp
    }

    /// `(r(s), r'(s))` sharing one inversion.
    pub fn point_and_derivative(&self, s: f64) -> (Vec2, Vec2) {
        let t = self.table.invert(s);
        let dp = polar_derivative(self.norm(), t);
        (
            polar_point(self.norm(), t),
            (1.0 / self.norm().eval(dp)) * dp,
        )
    }

    /// Arc-length parameter of the sphere point in direction `v` (any
    /// nonzero vector), in `[0, 2L)`.
    pub fn parameter_of(&self, v: Vec2) -> f64 {
        let theta = self.norm().basis().angle_of(v).rem_euclid(TAU);
        self.table.arc_length_at(theta)
    }

    /// Parameters of the images of the axis directions `0, pi/2, pi, 3pi/2`.
    pub fn axis_parameters(&self) -> [f64; 4] {
        let l = self.half_length();
        [
            0.0,
            self.table.arc_length_at(FRAC_PI_2),
            l,
            l + self.table.arc_length_at(FRAC_PI_2),
        ]
    }

    /// Parameters of the norm's singular directions, in `[0, 2L)`.
    pub fn singular_parameters(&self) -> Vec<f64> {
        self.norm()
            .singular_angles()
            .into_iter()
            .map(|a| self.table.arc_length_at(a.rem_euclid(TAU)))
            .collect()
    }
}

pub fn natural_point(curve: &NaturalCurve, s: f64) -> Vec2 {
    curve.point(s)
}

pub fn natural_derivative(curve: &NaturalCurve, s: f64) -> Vec2 {
    curve.derivative(s)
}

/// `phi(s)`: the unique parameter in `(s, s + 2L)` with `r(phi(s)) = r'(s)`.
///
/// The polar angle of `r'(s)` is read off in basis coordinates and mapped to
/// arc length, then shifted by a multiple of `2L` into the window.
pub fn phase_shift(curve: &NaturalCurve, s: f64) -> Result<f64> {
    let d = curve.derivative(s);
    let two_l = 2.0 * curve.half_length();
    let base = curve.parameter_of(d);
    let mut phi = base + two_l * ((s - base) / two_l).floor() + two_l;
    if phi <= s {
        phi += two_l;
    } else if phi >= s + two_l {
        phi -= two_l;
    }
    let residual = curve.norm().eval(curve.point(phi) - d);
    if !(residual <= PHASE_RESIDUAL_TOL) {
        return Err(Error::PhaseNotFound { s, residual });
    }
    Ok(phi)
}

/// The phase shift as a function object.
#[derive(Debug, Clone, Copy)]
pub struct PhaseShift<'a> {
    curve: &'a NaturalCurve,
}

impl<'a> PhaseShift<'a> {
    pub fn new(curve: &'a NaturalCurve) -> Self {
        Self { curve }
    }

    pub fn phi(&self, s: f64) -> Result<f64> {
        phase_shift(self.curve, s)
    }

    /// `phi'(s)` by a central difference with step `h`, unwrapping the
    /// window jump of `2L`.
    pub fn derivative(&self, s: f64, h: f64) -> Result<f64> {
        let two_l = 2.0 * self.curve.half_length();
        let a = self.phi(s - h)?;
        let b = self.phi(s + h)?;
        let mut diff = b - a;
        diff -= two_l * (diff / two_l).round();
        Ok(diff / (2.0 * h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::make_lp_norm;
    use crate::quadrature::trapezoid;

    fn l4() -> Norm2D {
        make_lp_norm(4.0).unwrap()
    }

    #[test]
    fn polar_point_examples() {
        let e = Norm2D::euclidean();
        let p = polar_point(&e, 0.0);
        assert!((p.x - 1.0).abs() < 1e-15 && p.y.abs() < 1e-15);
        for k in 0..20 {
            let t = 0.37 * k as f64;
            let p = polar_point(&e, t);
            assert!((p.x - t.cos()).abs() < 1e-15 && (p.y - t.sin()).abs() < 1e-15);
        }
        let q = polar_point(&l4(), std::f64::consts::FRAC_PI_4);
        let expect = 2f64.powf(-0.25);
        assert!((q.x - expect).abs() < 1e-15 && (q.y - expect).abs() < 1e-15);
    }

    #[test]
    fn polar_derivative_examples() {
        let d = polar_derivative(&Norm2D::euclidean(), 0.0);
        assert!(d.x.abs() < 1e-15 && (d.y - 1.0).abs() < 1e-15);
        let d4 = polar_derivative(&l4(), 0.0);
        let h = 1e-5;
        let fd = (1.0 / (2.0 * h)) * (polar_point(&l4(), h) - polar_point(&l4(), -h));
        assert!((d4.x - fd.x).abs() < 1e-9 && (d4.y - fd.y).abs() < 1e-9);
        assert!(d4.x.abs() < 1e-15 && (d4.y - 1.0).abs() < 1e-15);
        for k in 0..50 {
            let t = 0.13 * k as f64;
            assert!((polar_speed(&Norm2D::euclidean(), t) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn euclidean_table() {
        let table = build_arc_length(&Norm2D::euclidean(), 512).unwrap();
        assert!((table.half_length() - PI).abs() < 1e-12);
        let n = table.s_values().len() - 1;
        assert_eq!(table.s_values()[n], 2.0 * table.half_length());
        assert!((invert_arc_length(&table, FRAC_PI_2) - FRAC_PI_2).abs() < 1e-13);
        assert_eq!(invert_arc_length(&table, 0.0), 0.0);
    }

    #[test]
    fn l4_half_length_matches_trapezoid_oracle() {
        let norm = l4();
        let table = build_arc_length(&norm, DEFAULT_TABLE_GRID).unwrap();
        // Independent oracle: 10^6-panel trapezoid on ||p'|| with p' from
        // central differences of p, never touching the analytic gradient.
        let fd_speed = |t: f64| {
            let h = 1e-6;
            norm.eval((1.0 / (2.0 * h)) * (polar_point(&norm, t + h) - polar_point(&norm, t - h)))
        };
        let oracle = trapezoid(&fd_speed, 0.0, PI, 1_000_000);
        assert!(
            (table.half_length() - oracle).abs() < 1e-8,
            "{} vs {}",
            table.half_length(),
            oracle
        );
    }

    #[test]
    fn l4_inverse_at_half_of_half_length() {
        let norm = l4();
        let table = build_arc_length(&norm, DEFAULT_TABLE_GRID).unwrap();
        let target = 0.5 * table.half_length();
        let t = invert_arc_length(&table, target);
        let fd_speed = |u: f64| polar_speed(&norm, u);
        let oracle = trapezoid(&fd_speed, 0.0, t, 200_000);
        assert!((oracle - target).abs() < 1e-9, "{oracle} vs {target}");
        // The l4 ball is symmetric about both axes and the diagonal.
        assert!((t - FRAC_PI_2).abs() < 1e-10);
        let quarter = invert_arc_length(&table, 0.25 * table.half_length());
        assert!((quarter - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
    }

    #[test]
    fn table_rejects_small_grid_and_polyhedral_norm() {
        assert!(build_arc_length(&Norm2D::euclidean(), 128).is_err());
        assert!(build_arc_length(&Norm2D::l1(), 512).is_err());
    }

    #[test]
    fn natural_examples() {
        let c = NaturalCurve::new(&Norm2D::euclidean(), 512).unwrap();
        for k in 0..40 {
            let s = -3.0 + 0.41 * k as f64;
            let (r, dr) = c.point_and_derivative(s);
            assert!((r.x - s.cos()).abs() < 1e-13 && (r.y - s.sin()).abs() < 1e-13);
            assert!((dr.x + s.sin()).abs() < 1e-13 && (dr.y - s.cos()).abs() < 1e-13);
        }
        let c4 = NaturalCurve::build(&l4()).unwrap();
        let (r, dr) = c4.point_and_derivative(0.0);
        assert!((r.x - 1.0).abs() < 1e-15 && r.y.abs() < 1e-15);
        assert!(dr.x.abs() < 1e-12 && (dr.y - 1.0).abs() < 1e-12);
        for k in 0..64 {
            let s = 0.1 * k as f64;
            assert!((c4.norm().eval(c4.derivative(s)) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn euclidean_phase_shift() {
        let c = NaturalCurve::new(&Norm2D::euclidean(), 512).unwrap();
        for k in 0..30 {
            let s = -1.0 + 0.5 * k as f64;
            let phi = phase_shift(&c, s).unwrap();
            assert!((phi - s - FRAC_PI_2).abs() < 1e-12, "s = {s}: {phi}");
        }
        let ps = PhaseShift::new(&c);
        for k in 0..10 {
            let d = ps.derivative(0.3 + 0.7 * k as f64, 1e-4).unwrap();
            assert!((d - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn l4_phase_shift_window_and_identity() {
        let c = NaturalCurve::build(&l4()).unwrap();
        let two_l = 2.0 * c.half_length();
        for k in 0..50 {
            let s = -2.0 + 0.29 * k as f64;
            let phi = phase_shift(&c, s).unwrap();
            assert!(phi > s && phi < s + two_l);
            let diff = c.point(phi) - c.derivative(s);
            assert!(c.norm().eval(diff) < 1e-9);
        }
    }
}
