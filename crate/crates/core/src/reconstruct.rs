// SPDX-License-Identifier: Apache-2.0

//! Rebuilding a sphere from its curvatures, and the isometry extension check.
//!
//! `r'' = -rho r + tau r'` is a linear ODE, so a curvature profile and one
//! frame `(r(0), r'(0))` determine the whole sphere. Two spheres with the
//! same profile are therefore related by the linear map matching their
//! frames at `s = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{curvatures_at, CurvatureProfile, SINGULAR_BAND};
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::linalg::{Mat2, Vec2};
use crate::norm::Norm2D;
use crate::sphere_param::NaturalCurve;

/// Default RK4 step as a fraction of the half-length.
pub const DEFAULT_STEP_FRACTION: f64 = 1e-4;
/// `|r|` beyond which integration is abandoned.
pub const BLOW_UP_RADIUS: f64 = 10.0;

/// One point of the integrated system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub s: f64,
    pub r: Vec2,
    pub r_prime: Vec2,
}

/// Output of [`integrate_sphere`], sampled at every RK4 step.
#[derive(Debug, Clone)]
pub struct ReconstructedCurve {
    pub states: Vec<OdeState>,
    pub step: f64,
    pub half_length: f64,
    /// `max |r(s + L) + r(s)|` over the sampled range.
    pub antipodal_residual: f64,
    /// `max |r(s + 2L) - r(s)|`; zero when the range is shorter than `2L`.
    pub periodic_residual: f64,
}

/// `L`-periodic coefficient interpolated by a monotone cubic through the
/// samples of one period.
#[derive(Debug, Clone)]
pub struct PeriodicCoefficient {
    interp: MonotoneCubic,
    period: f64,
    lo: f64,
}

impl PeriodicCoefficient {
    /// `samples` are `(s, value)` with `s` anywhere; they are reduced modulo
    /// `period`, and three periods are laid out for the interpolant.
    pub fn new(samples: &[(f64, f64)], period: f64) -> Result<Self> {
        let mut base: Vec<(f64, f64)> = samples
            .iter()
            .map(|(s, v)| (s.rem_euclid(period), *v))
            .collect();
        base.sort_by(|a, b| a.0.total_cmp(&b.0));
        base.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 * period);
        if base.len() < 4 {
            return Err(Error::InvalidParameter(
                "periodic coefficient needs at least four distinct samples".into(),
            ));
        }
        let mut xs = Vec::with_capacity(3 * base.len());
        let mut ys = Vec::with_capacity(3 * base.len());
        for k in -1..=1 {
            for (s, v) in &base {
                xs.push(s + k as f64 * period);
                ys.push(*v);
            }
        }
        Ok(Self {
            interp: MonotoneCubic::new(xs, ys, None)?,
            period,
            lo: 0.0,
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.interp
            .eval((s - self.lo).rem_euclid(self.period) + self.lo)
    }
}

/// `(rho, tau)` interpolants of a curvature profile.
pub fn profile_coefficients(
    profile: &CurvatureProfile,
) -> Result<(PeriodicCoefficient, PeriodicCoefficient)> {
    let l = profile.half_length;
    let rho: Vec<(f64, f64)> = profile
        .s
        .iter()
        .copied()
        .zip(profile.rho.iter().copied())
        .collect();
    let tau: Vec<(f64, f64)> = profile
        .s
        .iter()
        .copied()
        .zip(profile.tau.iter().copied())
        .collect();
    Ok((
        PeriodicCoefficient::new(&rho, l)?,
        PeriodicCoefficient::new(&tau, l)?,
    ))
}

/// Classical RK4 for `r'' = -rho(s) r + tau(s) r'` on `[0, s_max]`.
///
/// The step is shrunk so that `L` is a whole number of steps; closure
/// residuals compare samples exactly `L` and `2L` apart.
#[allow(clippy::too_many_arguments)]
pub fn integrate_sphere<R, T>(
    rho: &R,
    tau: &T,
    r0: Vec2,
    r0p: Vec2,
    half_length: f64,
    s_max: f64,
    step: f64,
) -> Result<ReconstructedCurve>
where
    R: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    if r0.cross(r0p).abs() < 1e-12 {
        return Err(Error::SingularFrame {
            s: 0.0,
            det: r0.cross(r0p),
        });
    }
    if !(step > 0.0) || !(half_length > 0.0) || !(s_max > 0.0) {
        return Err(Error::InvalidParameter(
            "step, half-length and range must be positive".into(),
        ));
    }
    let per_half = (half_length / step).ceil().max(1.0) as usize;
    let h = half_length / per_half as f64;
    let n = (s_max / h).round().max(1.0) as usize;
    let field = |s: f64, r: Vec2, v: Vec2| -> (Vec2, Vec2) { (v, tau(s) * v - rho(s) * r) };
    let mut states = Vec::with_capacity(n + 1);
    let (mut r, mut v) = (r0, r0p);
    states.push(OdeState {
        s: 0.0,
        r,
        r_prime: v,
    });
    for k in 0..n {
        let s = h * k as f64;
        let (k1r, k1v) = field(s, r, v);
        let (k2r, k2v) = field(s + 0.5 * h, r + (0.5 * h) * k1r, v + (0.5 * h) * k1v);
        let (k3r, k3v) = field(s + 0.5 * h, r + (0.5 * h) * k2r, v + (0.5 * h) * k2v);
        let (k4r, k4v) = field(s + h, r + h * k3r, v + h * k3v);
        r += (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        let magnitude = r.coord_len();
        if !(magnitude <= BLOW_UP_RADIUS) {
            return Err(Error::BlowUp {
                s: s + h,
                magnitude,
            });
        }
        states.push(OdeState {
            s: h * (k + 1) as f64,
            r,
            r_prime: v,
        });
    }
    let shifted_max = |shift: usize, sign: f64| -> f64 {
        (0..states.len().saturating_sub(shift))
            .map(|i| (states[i + shift].r + sign * states[i].r).coord_len())
            .fold(0.0, f64::max)
    };
    Ok(ReconstructedCurve {
        antipodal_residual: shifted_max(per_half, 1.0),
        periodic_residual: shifted_max(2 * per_half, -1.0),
        states,
        step: h,
        half_length,
    })
}

/// Integrates the Cramer profile of `curve` from its own frame at `s = 0`
/// over `[0, 2L]` and returns the curve with the maximum deviation (in the
/// norm) from the true natural parameterization.
pub fn round_trip(
    curve: &NaturalCurve,
    profile: &CurvatureProfile,
    step: f64,
) -> Result<(ReconstructedCurve, f64)> {
    let (rho, tau) = profile_coefficients(profile)?;
    let (r0, r0p) = curve.point_and_derivative(0.0);
    let l = curve.half_length();
    let rec = integrate_sphere(
        &|s| rho.eval(s),
        &|s| tau.eval(s),
        r0,
        r0p,
        l,
        2.0 * l,
        step,
    )?;
    let dev = rec
        .states
        .iter()
        .map(|st| curve.norm().eval(st.r - curve.point(st.s)))
        .fold(0.0, f64::max);
    Ok((rec, dev))
}

/// The linear map sending `frame_x.0 -> frame_y.0` and `frame_x.1 -> frame_y.1`.
pub fn build_isometry(frame_x: (Vec2, Vec2), frame_y: (Vec2, Vec2)) -> Result<Mat2> {
    let x = Mat2::from_cols(frame_x.0, frame_x.1);
    let y = Mat2::from_cols(frame_y.0, frame_y.1);
    for m in [x, y] {
        if m.det().abs() < 1e-12 {
            return Err(Error::SingularFrame {
                s: 0.0,
                det: m.det(),
            });
        }
    }
    let inv = x.inverse().ok_or(Error::SingularFrame {
        s: 0.0,
        det: x.det(),
    })?;
    Ok(y * inv)
}

/// Tolerances and sizes of [`tingley_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct TingleyOptions {
    /// Points of the curvature comparison grid over `[0, 2L)`.
    pub curvature_grid: usize,
    /// Points of the residual grid over `[0, 2L)`.
    pub residual_grid: usize,
    pub rho_tol: f64,
    pub tau_tol: f64,
    /// Relative tolerance on the half-lengths.
    pub length_tol: f64,
    /// Ground-truth map, when known.
    pub reference: Option<Mat2>,
}

impl Default for TingleyOptions {
    fn default() -> Self {
        Self {
            curvature_grid: 512,
            residual_grid: 2048,
            rho_tol: 1e-2,
            tau_tol: 5e-2,
            length_tol: 1e-6,
            reference: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryReport {
    pub f: Mat2,
    pub det: f64,
    /// `max |‖F r_X(s)‖_Y - 1|`.
    pub max_sphere_residual: f64,
    /// `max ‖F r_X(s) - r_Y(s)‖_Y`.
    pub frame_residual: f64,
    pub rho_mismatch: f64,
    pub tau_mismatch: f64,
    pub half_length_x: f64,
    pub half_length_y: f64,
    /// Entrywise `max |F - reference|`.
    pub reference_deviation: Option<f64>,
}

fn mismatch(
    cx: &NaturalCurve,
    cy: &NaturalCurve,
    grid: usize,
    reversed: bool,
) -> Result<(f64, f64)> {
    let period = 2.0 * cx.half_length();
    let period_y = 2.0 * cy.half_length();
    let mut sing: Vec<f64> = cx.singular_parameters();
    for p in cy.singular_parameters() {
        sing.push(if reversed { period_y - p } else { p });
    }
    let near = |s: f64| {
        sing.iter().any(|&c| {
            let d = (s - c).rem_euclid(period);
            d.min(period - d) <= 2.0 * SINGULAR_BAND
        })
    };
    let mut d_rho: f64 = 0.0;
    let mut d_tau: f64 = 0.0;
    for k in 0..grid {
        let s = period * k as f64 / grid as f64;
        if near(s) {
            continue;
        }
        let (rx, tx) = curvatures_at(cx, s)?;
        let (ry, ty) = if reversed {
            let (a, b) = curvatures_at(cy, -s)?;
            (a, -b)
        } else {
            curvatures_at(cy, s)?
        };
        d_rho = d_rho.max((rx - ry).abs());
        d_tau = d_tau.max((tx - ty).abs());
    }
    Ok((d_rho, d_tau))
}

/// Checks that the correspondence `e1 -> e1_y`, `e2 -> e2_y` between the
/// unit spheres of `norm_x` (with its own basis) and `norm_y` extends to a
/// linear isometry, and returns that map with its residuals.
pub fn tingley_check(
    norm_x: &Norm2D,
    norm_y: &Norm2D,
    e1_y: Vec2,
    e2_y: Vec2,
    opts: &TingleyOptions,
) -> Result<IsometryReport> {
    let ny = norm_y.with_basis(e1_y, e2_y)?;
    let cx = NaturalCurve::build(norm_x)?;
    let cy = NaturalCurve::build(&ny)?;
    let (lx, ly) = (cx.half_length(), cy.half_length());
    let dl = (lx - ly).abs();
    let grid = opts.curvature_grid.max(16);
    let (d_rho, d_tau) = mismatch(&cx, &cy, grid, false)?;
    let within =
        |r: f64, t: f64| r <= opts.rho_tol && t <= opts.tau_tol && dl <= opts.length_tol * lx;
    if !within(d_rho, d_tau) {
        // The e2 images fix the orientation; a match only after reversal
        // means the prescribed correspondence is the wrong one.
        if dl <= opts.length_tol * lx {
            let (r_rev, t_rev) = mismatch(&cx, &cy, grid, true)?;
            if within(r_rev, t_rev) {
                return Err(Error::ReflectionAmbiguity);
            }
        }
        return Err(Error::CurvatureMismatch {
            rho: d_rho,
            tau: d_tau,
            half_length: dl,
        });
    }
    let (x0, x1) = cx.point_and_derivative(0.0);
    let (y0, y1) = cy.point_and_derivative(0.0);
    let f = build_isometry((x0, x1), (y0, y1))?;
    let mut sphere: f64 = 0.0;
    let mut frame: f64 = 0.0;
    let n = opts.residual_grid.max(16);
    for k in 0..n {
        let s = 2.0 * lx * k as f64 / n as f64;
        let image = f * cx.point(s);
        sphere = sphere.max((ny.eval(image) - 1.0).abs());
        frame = frame.max(ny.eval(image - cy.point(s)));
    }
    let reference_deviation = opts.reference.map(|a| {
        let (p, q) = (f.rows(), a.rows());
        (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (p[i][j] - q[i][j]).abs())
            .fold(0.0, f64::max)
    });
    Ok(IsometryReport {
        f,
        det: f.det(),
        max_sphere_residual: sphere,
        frame_residual: frame,
        rho_mismatch: d_rho,
        tau_mismatch: d_tau,
        half_length_x: lx,
        half_length_y: ly,
        reference_deviation,
    })
}

/// A seeded random 2x2 matrix with condition number at most `max_cond` and
/// entries in `[-2, 2]`.
pub fn random_well_conditioned_map(seed: u64, max_cond: f64) -> Mat2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = Mat2::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        if m.det().abs() > 0.1 && m.condition_number() <= max_cond {
            return m;
        }
    }
}
