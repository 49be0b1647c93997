// SPDX-License-Identifier: Apache-2.0

//! Planar norms with a fixed basis.
//!
//! A [`Norm2D`] evaluates a norm on coordinate vectors of the plane and
//! carries the basis `(e1, e2)` used to build the polar parameterization of
//! its unit sphere. Built-in families have closed-form gradients; norms given
//! by a radial profile `h(theta)` (the distance from the origin to the unit
//! sphere in direction `theta`) differentiate the profile numerically unless
//! an analytic derivative is supplied.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interp::PeriodicSpline;
use crate::linalg::{Covec2, Mat2, Vec2};
use crate::quadrature::golden_section_min;

/// Default sample count for [`norm_constants`].
pub const DEFAULT_CONSTANTS_GRID: usize = 4096;

const BASIS_TOL: f64 = 1e-9;

/// Regularity class of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    /// Twice continuously differentiable sphere.
    C2,
    /// Continuously differentiable with absolutely continuous derivative
    /// (second derivative may blow up at isolated points).
    AC1,
    /// Continuously differentiable only.
    C1,
    /// Not smooth; only usable by bound-checking utilities.
    Polyhedral,
}

impl Smoothness {
    pub fn is_smooth(self) -> bool {
        !matches!(self, Smoothness::Polyhedral)
    }
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Smoothness::C2 => "C2",
            Smoothness::AC1 => "AC1",
            Smoothness::C1 => "C1",
            Smoothness::Polyhedral => "polyhedral",
        };
        f.write_str(s)
    }
}

/// A basis `(e1, e2)` of the plane with its biorthogonal functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis2D {
    pub e1: Vec2,
    pub e2: Vec2,
    pub e1_star: Covec2,
    pub e2_star: Covec2,
}

impl Basis2D {
    pub fn new(e1: Vec2, e2: Vec2) -> Result<Self> {
        let inv = Mat2::from_cols(e1, e2).inverse().ok_or_else(|| {
            Error::InvalidBasis(format!("{e1:?} and {e2:?} are linearly dependent"))
        })?;
        Ok(Self {
            e1,
            e2,
            e1_star: Covec2::new(inv.a, inv.b),
            e2_star: Covec2::new(inv.c, inv.d),
        })
    }

    pub fn canonical() -> Self {
        Self::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).expect("canonical basis")
    }

    /// Coordinates `(e1*(v), e2*(v))`.
    pub fn coords(&self, v: Vec2) -> (f64, f64) {
        (self.e1_star.apply(v), self.e2_star.apply(v))
    }

    /// `a e1 + b e2`.
    pub fn combine(&self, a: f64, b: f64) -> Vec2 {
        a * self.e1 + b * self.e2
    }

    /// `e^{it} = cos(t) e1 + sin(t) e2`.
    pub fn circle_point(&self, t: f64) -> Vec2 {
        let (s, c) = t.sin_cos();
        self.combine(c, s)
    }

    /// Matrix with columns `e1`, `e2`.
    pub fn matrix(&self) -> Mat2 {
        Mat2::from_cols(self.e1, self.e2)
    }

    /// Polar angle of `v` measured in basis coordinates.
    pub fn angle_of(&self, v: Vec2) -> f64 {
        let (a, b) = self.coords(v);
        b.atan2(a)
    }
}

/// Auxiliary Euclidean norm `sqrt(e1*(v)^2 + e2*(v)^2)` induced by the basis.
pub fn aux_euclidean_norm(basis: &Basis2D, v: Vec2) -> f64 {
    let (a, b) = basis.coords(v);
    a.hypot(b)
}

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Euclidean,
    Lp(f64),
    L1,
    Radial {
        profile: Profile,
        derivative: Option<Profile>,
        label: String,
    },
    Linear {
        inner: Box<Norm2D>,
        inverse: Mat2,
        label: String,
    },
}

/// A norm on the plane together with a basis of unit vectors.
#[derive(Clone)]
pub struct Norm2D {
    kind: Kind,
    basis: Basis2D,
    smoothness: Smoothness,
}

impl fmt::Debug for Norm2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Norm2D")
            .field("kind", &self.label())
            .field("basis", &self.basis)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl Norm2D {
    /// Euclidean norm with the canonical basis.
    pub fn euclidean() -> Self {
        Self {
            kind: Kind::Euclidean,
            basis: Basis2D::canonical(),
            smoothness: Smoothness::C2,
        }
    }

    /// `l1` norm; not smooth, provided for bound checks.
    pub fn l1() -> Self {
        Self {
            kind: Kind::L1,
            basis: Basis2D::canonical(),
            smoothness: Smoothness::Polyhedral,
        }
    }

    pub fn basis(&self) -> &Basis2D {
        &self.basis
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    /// Short human-readable description.
    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Euclidean => "euclidean".into(),
            Kind::Lp(p) => format!("lp:{p}"),
            Kind::L1 => "l1".into(),
            Kind::Radial { label, .. } => label.clone(),
            Kind::Linear { label, .. } => label.clone(),
        }
    }

    /// Returns the same norm with another basis. Both vectors must be unit
    /// vectors of the norm and linearly independent.
    pub fn with_basis(&self, e1: Vec2, e2: Vec2) -> Result<Self> {
        let basis = Basis2D::new(e1, e2)?;
        for (name, e) in [("e1", e1), ("e2", e2)] {
            let n = self.eval(e);
            if (n - 1.0).abs() > BASIS_TOL {
                return Err(Error::InvalidBasis(format!(
                    "{name} has norm {n}, expected 1"
                )));
            }
        }
        Ok(Self {
            kind: self.kind.clone(),
            basis,
            smoothness: self.smoothness,
        })
    }

    /// The norm `y -> ||A^{-1} y||` of the image space under `A`, with basis
    /// `(A e1, A e2)`. `A` is then a linear isometry from `self` onto the
    /// result.
    pub fn linear_image(&self, a: Mat2) -> Result<Self> {
        let inverse = a
            .inverse()
            .ok_or_else(|| Error::InvalidParameter("linear image under a singular map".into()))?;
        let basis = Basis2D::new(a * self.basis.e1, a * self.basis.e2)?;
        let r = a.rows();
        Ok(Self {
            kind: Kind::Linear {
                inner: Box::new(self.clone()),
                inverse,
                label: format!(
                    "image of {} under [[{}, {}], [{}, {}]]",
                    self.label(),
                    r[0][0],
                    r[0][1],
                    r[1][0],
                    r[1][1]
                ),
            },
            basis,
            smoothness: self.smoothness,
        })
    }

    pub fn eval(&self, v: Vec2) -> f64 {
        match &self.kind {
            Kind::Euclidean => v.coord_len(),
            Kind::Lp(p) => lp_eval(*p, v),
            Kind::L1 => v.x.abs() + v.y.abs(),
            Kind::Radial { profile, .. } => {
                let r = v.coord_len();
                if r == 0.0 {
                    0.0
                } else {
                    r / profile(v.y.atan2(v.x))
                }
            }
            Kind::Linear { inner, inverse, .. } => inner.eval(*inverse * v),
        }
    }

    /// Gradient of the norm at `v != 0` (a covector). Returns `None` for norms
    /// without a usable gradient.
    pub fn grad(&self, v: Vec2) -> Option<Covec2> {
        match &self.kind {
            Kind::Euclidean => {
                let r = v.coord_len();
                Some(Covec2::new(v.x / r, v.y / r))
            }
            Kind::Lp(p) => Some(lp_grad(*p, v)),
            Kind::L1 => None,
            Kind::Radial {
                profile,
                derivative,
                ..
            } => {
                let r = v.coord_len();
                let theta = v.y.atan2(v.x);
                let h = profile(theta);
                let dh = match derivative {
                    Some(d) => d(theta),
                    None => {
                        let step = 1e-6;
                        (profile(theta + step) - profile(theta - step)) / (2.0 * step)
                    }
                };
                // d/dv (r / h(theta)) with grad(theta) = (-y, x) / r^2.
                let radial = Covec2::new(v.x / (r * h), v.y / (r * h));
                let k = dh / (h * h * r);
                Some(Covec2::new(radial.x + k * v.y, radial.y - k * v.x))
            }
            Kind::Linear { inner, inverse, .. } => {
                inner.grad(*inverse * v).map(|g| g.compose(*inverse))
            }
        }
    }

    /// Gradient by central differences of `eval`.
    pub fn numeric_grad(&self, v: Vec2, step: f64) -> Covec2 {
        let dx = Vec2::new(step, 0.0);
        let dy = Vec2::new(0.0, step);
        Covec2::new(
            (self.eval(v + dx) - self.eval(v - dx)) / (2.0 * step),
            (self.eval(v + dy) - self.eval(v - dy)) / (2.0 * step),
        )
    }

    /// Angles `t` (in basis coordinates) at which the sphere's curvature is
    /// singular and which curvature grids must avoid.
    pub fn singular_angles(&self) -> Vec<f64> {
        self.singular_directions()
            .into_iter()
            .map(|v| self.basis.angle_of(v))
            .collect()
    }

    fn singular_directions(&self) -> Vec<Vec2> {
        match &self.kind {
            Kind::Lp(p) if *p < 2.0 => vec![
                Vec2::new(1.0, 0.0),
                Vec2::new(0.0, 1.0),
                Vec2::new(-1.0, 0.0),
                Vec2::new(0.0, -1.0),
            ],
            Kind::Linear { inner, inverse, .. } => {
                let forward = inverse.inverse().unwrap_or(Mat2::IDENTITY);
                inner
                    .singular_directions()
                    .into_iter()
                    .map(|v| forward * v)
                    .collect()
            }
            _ => Vec::new(),
        }
    }
}

fn lp_eval(p: f64, v: Vec2) -> f64 {
    let ax = v.x.abs();
    let ay = v.y.abs();
    let m = ax.max(ay);
    if m == 0.0 {
        return 0.0;
    }
    m * ((ax / m).powf(p) + (ay / m).powf(p)).powf(1.0 / p)
}

fn lp_grad(p: f64, v: Vec2) -> Covec2 {
    let n = lp_eval(p, v);
    let g = |c: f64| c.signum() * (c.abs() / n).powf(p - 1.0);
    Covec2::new(
        if v.x == 0.0 { 0.0 } else { g(v.x) },
        if v.y == 0.0 { 0.0 } else { g(v.y) },
    )
}

/// The `l_p` norm `(|x|^p + |y|^p)^{1/p}` with the canonical basis.
pub fn make_lp_norm(p: f64) -> Result<Norm2D> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "l_p norm needs 1 < p < infinity, got {p}"
        )));
    }
    if p == 2.0 {
        return Ok(Norm2D::euclidean());
    }
    Ok(Norm2D {
        kind: Kind::Lp(p),
        basis: Basis2D::canonical(),
        smoothness: if p >= 2.0 {
            Smoothness::C2
        } else {
            Smoothness::AC1
        },
    })
}

/// Sample count used by the radial-profile convexity test.
pub const PROFILE_CHECK_GRID: usize = 4096;

/// Norm whose unit sphere is `{h(theta) (cos theta, sin theta)}` in canonical
/// coordinates, i.e. `||v|| = |v| / h(arg v)`.
///
/// The profile must be positive, `pi`-symmetric and bound a convex body;
/// both conditions are checked on a dense grid. The basis is the pair of
/// coordinate axes scaled to unit norm.
pub fn make_radial_norm<F>(profile: F, smoothness: Smoothness) -> Result<Norm2D>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    build_radial(Arc::new(profile), None, smoothness, "radial".into())
}

/// Like [`make_radial_norm`] with an analytic profile derivative.
pub fn make_radial_norm_with_derivative<F, D>(
    profile: F,
    derivative: D,
    smoothness: Smoothness,
    label: &str,
) -> Result<Norm2D>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
    D: Fn(f64) -> f64 + Send + Sync + 'static,
{
    build_radial(
        Arc::new(profile),
        Some(Arc::new(derivative)),
        smoothness,
        label.into(),
    )
}

/// Radial norm from samples `(theta_i, h_i)` joined by a periodic cubic spline.
pub fn make_radial_norm_from_samples(samples: &[(f64, f64)]) -> Result<Norm2D> {
    let spline = Arc::new(PeriodicSpline::new(samples.to_vec(), TAU)?);
    let s1 = Arc::clone(&spline);
    let s2 = spline;
    build_radial(
        Arc::new(move |t| s1.eval(t)),
        Some(Arc::new(move |t| s2.eval_with_derivative(t).1)),
        Smoothness::C2,
        format!("radial:{} samples", samples.len()),
    )
}

fn build_radial(
    profile: Profile,
    derivative: Option<Profile>,
    smoothness: Smoothness,
    label: String,
) -> Result<Norm2D> {
    check_profile(profile.as_ref())?;
    let e1 = Vec2::new(profile(0.0), 0.0);
    let e2 = Vec2::new(0.0, profile(FRAC_PI_2));
    Ok(Norm2D {
        kind: Kind::Radial {
            profile,
            derivative,
            label,
        },
        basis: Basis2D::new(e1, e2)?,
        smoothness,
    })
}

/// Positivity, central symmetry and convexity of a radial profile on a grid.
pub fn check_profile(profile: &(dyn Fn(f64) -> f64 + Send + Sync)) -> Result<()> {
    let n = PROFILE_CHECK_GRID;
    let pts: Vec<Vec2> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            let h = profile(t);
            h * Vec2::new(t.cos(), t.sin())
        })
        .collect();
    for (k, p) in pts.iter().enumerate() {
        let h = p.coord_len();
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::NonConvexProfile(format!(
                "profile not positive at theta = {}",
                TAU * k as f64 / n as f64
            )));
        }
        let opposite = pts[(k + n / 2) % n].coord_len();
        if (h - opposite).abs() > 1e-7 * h {
            return Err(Error::NonConvexProfile(format!(
                "profile is not centrally symmetric at theta = {} ({h} vs {opposite})",
                TAU * k as f64 / n as f64
            )));
        }
    }
    for k in 0..n {
        let a = pts[(k + n - 1) % n];
        let b = pts[k];
        let c = pts[(k + 1) % n];
        let turn = (b - a).cross(c - b);
        let scale = (b - a).coord_len() * (c - b).coord_len();
        if turn < -1e-9 * scale {
            return Err(Error::NonConvexProfile(format!(
                "boundary turns clockwise at theta = {}",
                TAU * k as f64 / n as f64
            )));
        }
    }
    Ok(())
}

/// Extremes of the norm over the auxiliary Euclidean unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormConstants {
    /// `min { ||x|| : |x| = 1 }`.
    pub c: f64,
    /// `max { ||x|| : |x| = 1 }`.
    pub big_c: f64,
}

impl NormConstants {
    /// Lower bound `c / C` for the speed of the polar parameterization.
    pub fn polar_speed_lower(&self) -> f64 {
        self.c / self.big_c
    }

    /// Upper bound `2 C^2 / c^2` for the speed of the polar parameterization.
    pub fn polar_speed_upper(&self) -> f64 {
        2.0 * self.big_c * self.big_c / (self.c * self.c)
    }

    /// `(C + c) C / c^2`, the ratio bounding tangential by radial quantities.
    pub fn tangential_ratio(&self) -> f64 {
        (self.big_c + self.c) * self.big_c / (self.c * self.c)
    }

    /// `c^2 / (C^2 + C c + c^2)`, the lower bound for the radial supercurvature.
    pub fn radial_super_lower(&self) -> f64 {
        let (c, bc) = (self.c, self.big_c);
        c * c / (bc * bc + bc * c + c * c)
    }
}

/// Computes `c` and `C` by sampling `||e^{it}||` on a uniform grid over
/// `[0, 2 pi)` and polishing the best candidates with golden-section search.
pub fn norm_constants(norm: &Norm2D, grid_size: usize) -> Result<NormConstants> {
    if grid_size < 64 {
        return Err(Error::InvalidParameter(format!(
            "grid_size must be at least 64, got {grid_size}"
        )));
    }
    let basis = *norm.basis();
    let f = |t: f64| norm.eval(basis.circle_point(t));
    let h = TAU / grid_size as f64;
    let samples: Vec<f64> = (0..grid_size).map(|k| f(h * k as f64)).collect();
    if let Some(k) = samples.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateNorm(format!(
            "norm of e^(it) is {} at t = {}",
            samples[k],
            h * k as f64
        )));
    }
    let refine = |sign: f64| -> f64 {
        let g = |t: f64| sign * f(t);
        let best = samples
            .iter()
            .map(|v| sign * v)
            .fold(f64::INFINITY, f64::min);
        let spread = samples
            .iter()
            .map(|v| sign * v)
            .fold(f64::NEG_INFINITY, f64::max)
            - best;
        let mut candidates: Vec<usize> = (0..grid_size)
            .filter(|&k| {
                let v = sign * samples[k];
                let prev = sign * samples[(k + grid_size - 1) % grid_size];
                let next = sign * samples[(k + 1) % grid_size];
                v <= prev && v <= next && v <= best + 1e-3 * spread.max(1e-300)
            })
            .collect();
        candidates.sort_by(|&a, &b| (sign * samples[a]).total_cmp(&(sign * samples[b])));
        candidates.truncate(16);
        let mut out = best;
        for k in candidates {
            let t = h * k as f64;
            let (_, v) = golden_section_min(&g, t - h, t + h, 1e-12);
            out = out.min(v);
        }
        sign * out
    };
    let c = refine(1.0);
    let big_c = refine(-1.0);
    Ok(NormConstants { c, big_c })
}
