// SPDX-License-Identifier: Apache-2.0

//! Curvatures recovered from distances between sphere points alone.
//!
//! Everything here talks to the sphere through a [`DistanceOracle`], which
//! only answers `||r(s1) - r(s2)||`. The radial curvature comes from nearly
//! antipodal chords, `psi'` from short chords (or from the helper integrals
//! where `rho` vanishes), and `tau = rho psi` once `psi` is pinned by the
//! requirement that `tau` integrates to zero over a half period.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::{GridFunction, GridInterpolation, PeriodicSpline};
use crate::linalg::Vec2;
use crate::norm::{make_radial_norm_from_samples, Norm2D};
use crate::quadrature::{bisect, cumulative_trapezoid, simpson, trapezoid_samples};
use crate::richardson::extrapolate_schedule;
use crate::sphere_param::NaturalCurve;

pub const DEFAULT_SCHEDULE: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
pub const DEFAULT_RHO_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_NULL_TOL: f64 = 1e-8;
pub const DEFAULT_ESTIMATE_GRID: usize = 1024;

/// Pairwise distances on a sphere, indexed by arc length.
pub trait DistanceOracle: Sync {
    /// `||r(s1) - r(s2)||`.
    fn dist(&self, s1: f64, s2: f64) -> f64;
    /// Half-length `L`.
    fn half_length(&self) -> f64;
}

/// Oracle backed by an in-process natural parameterization.
#[derive(Debug, Clone)]
pub struct CurveOracle {
    curve: NaturalCurve,
}

impl CurveOracle {
    pub fn new(curve: NaturalCurve) -> Self {
        Self { curve }
    }

    pub fn curve(&self) -> &NaturalCurve {
        &self.curve
    }
}

impl DistanceOracle for CurveOracle {
    fn dist(&self, s1: f64, s2: f64) -> f64 {
        self.curve
            .norm()
            .eval(self.curve.point(s1) - self.curve.point(s2))
    }

    fn half_length(&self) -> f64 {
        self.curve.half_length()
    }
}

/// The same oracle with its parameter shifted: `dist'(a, b) = dist(a + d, b + d)`.
#[derive(Debug, Clone)]
pub struct ShiftedOracle<O> {
    pub inner: O,
    pub shift: f64,
}

impl<O: DistanceOracle> DistanceOracle for ShiftedOracle<O> {
    fn dist(&self, s1: f64, s2: f64) -> f64 {
        self.inner.dist(s1 + self.shift, s2 + self.shift)
    }

    fn half_length(&self) -> f64 {
        self.inner.half_length()
    }
}

/// Oracle built from samples `(s_i, r(s_i))` of one full period `[0, 2L)`.
///
/// The coordinates are interpolated by periodic cubic splines in `s`, and
/// distances are measured in the radial norm whose unit sphere passes
/// through the samples.
#[derive(Debug, Clone)]
pub struct SampledOracle {
    x: PeriodicSpline,
    y: PeriodicSpline,
    norm: Norm2D,
    half_length: f64,
}

impl SampledOracle {
    /// `half_length` defaults to half of `s_last + (s_last - s_prev)`, the
    /// period implied by uniform sampling.
    pub fn new(samples: &[(f64, Vec2)], half_length: Option<f64>) -> Result<Self> {
        if samples.len() < 16 {
            return Err(Error::InvalidParameter(format!(
                "sampled oracle needs at least 16 samples, got {}",
                samples.len()
            )));
        }
        let n = samples.len();
        let period = match half_length {
            Some(l) => 2.0 * l,
            None => 2.0 * samples[n - 1].0 - samples[n - 2].0,
        };
        if !(period > samples[n - 1].0 - samples[0].0) {
            return Err(Error::InvalidParameter(format!(
                "period {period} does not exceed the sampled range"
            )));
        }
        let x = PeriodicSpline::new(samples.iter().map(|(s, p)| (*s, p.x)).collect(), period)?;
        let y = PeriodicSpline::new(samples.iter().map(|(s, p)| (*s, p.y)).collect(), period)?;
        let mut radial: Vec<(f64, f64)> = samples
            .iter()
            .map(|(_, p)| (p.y.atan2(p.x), p.coord_len()))
            .collect();
        radial.sort_by(|a, b| a.0.total_cmp(&b.0));
        radial.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
        let norm = make_radial_norm_from_samples(&radial)?;
        Ok(Self {
            x,
            y,
            norm,
            half_length: 0.5 * period,
        })
    }

    pub fn point(&self, s: f64) -> Vec2 {
        Vec2::new(self.x.eval(s), self.y.eval(s))
    }

    pub fn norm(&self) -> &Norm2D {
        &self.norm
    }
}

impl DistanceOracle for SampledOracle {
    fn dist(&self, s1: f64, s2: f64) -> f64 {
        self.norm.eval(self.point(s1) - self.point(s2))
    }

    fn half_length(&self) -> f64 {
        self.half_length
    }
}

/// Thresholds and schedules of the estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOptions {
    /// Strictly decreasing step schedule, at least three entries.
    pub schedule: Vec<f64>,
    pub rho_threshold: f64,
    pub null_tol: f64,
    /// Probe width of the classification; defaults to the coarsest step.
    pub probe_eps: Option<f64>,
    /// Number of grid intervals over `[0, L]`.
    pub grid: usize,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            schedule: DEFAULT_SCHEDULE.to_vec(),
            rho_threshold: DEFAULT_RHO_THRESHOLD,
            null_tol: DEFAULT_NULL_TOL,
            probe_eps: None,
            grid: DEFAULT_ESTIMATE_GRID,
        }
    }
}

impl EstimatorOptions {
    pub fn probe(&self) -> f64 {
        self.probe_eps.unwrap_or(self.schedule[0])
    }
}

fn check_schedule(schedule: &[f64], half_length: f64) -> Result<()> {
    if schedule.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "eps schedule needs at least three values, got {}",
            schedule.len()
        )));
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter(
            "eps schedule must be strictly decreasing".into(),
        ));
    }
    if !(schedule[schedule.len() - 1] > 0.0) || schedule[0] > 0.25 * half_length {
        return Err(Error::InvalidParameter(format!(
            "eps schedule must lie in (0, L/4] = (0, {}]",
            0.25 * half_length
        )));
    }
    Ok(())
}

/// Absolute rounding error of one distance evaluation between points of
/// norm about one.
const DIST_NOISE: f64 = 1e-15;

/// Last extrapolated value, after checking that the last two extrapolations
/// agree to 10% (or to `floor` in absolute terms).
fn settled(s: f64, steps: &[f64], values: &[f64], floor: f64) -> Result<f64> {
    let ex = extrapolate_schedule(steps, values, 2);
    let b = ex[ex.len() - 1];
    let a = ex[ex.len() - 2];
    let gap = (a - b).abs();
    if !b.is_finite() || (gap > 0.1 * a.abs().max(b.abs()) && gap > floor) {
        return Err(Error::ScheduleTooCoarse { s, a, b });
    }
    Ok(b)
}

/// `rho(s)` from `q(eps) = (2 - dist(s + eps, s + L - eps)) / eps^2`,
/// extrapolated in `eps^2`.
pub fn estimate_rho<O: DistanceOracle + ?Sized>(
    oracle: &O,
    s: f64,
    schedule: &[f64],
) -> Result<f64> {
    let l = oracle.half_length();
    check_schedule(schedule, l)?;
    let q: Vec<f64> = schedule
        .iter()
        .map(|&e| (2.0 - oracle.dist(s + e, s + l - e)) / (e * e))
        .collect();
    let rho = settled(s, schedule, &q, 1e-6)?;
    if rho >= 0.0 {
        Ok(rho)
    } else if rho >= -1e-8 {
        Ok(0.0)
    } else {
        Err(Error::ScheduleTooCoarse {
            s,
            a: q[q.len() - 1],
            b: rho,
        })
    }
}

/// Estimated radial curvature on a uniform `L`-periodic grid.
#[derive(Debug, Clone)]
pub struct RhoTable {
    values: Vec<f64>,
    step: f64,
    half_length: f64,
    interp: GridFunction,
}

impl RhoTable {
    /// Wraps samples at `s_k = k L / n`, `k = 0..n`.
    pub fn from_samples(values: Vec<f64>, half_length: f64) -> Result<Self> {
        let step = half_length / values.len() as f64;
        let interp = GridFunction::new(0.0, step, values.clone(), true, GridInterpolation::Cubic)?;
        Ok(Self {
            values,
            step,
            half_length,
            interp,
        })
    }

    /// Runs [`estimate_rho`] at `n` grid points in parallel.
    pub fn estimate<O: DistanceOracle + ?Sized>(
        oracle: &O,
        n: usize,
        schedule: &[f64],
    ) -> Result<Self> {
        let l = oracle.half_length();
        let values = (0..n)
            .into_par_iter()
            .map(|k| estimate_rho(oracle, l * k as f64 / n as f64, schedule))
            .collect::<Result<Vec<f64>>>()?;
        Self::from_samples(values, l)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.interp.eval(s)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }
}

/// `I, II, J, JJ` of a base point at one `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelperIntegrals {
    pub i: f64,
    pub ii: f64,
    pub j: f64,
    pub jj: f64,
}

/// The helper integrals at `(s, eps)`, by composite Simpson on their
/// single-integral forms `II = int (eps - u) rho`, `JJ = int (eps - u) u rho`.
pub fn helper_integrals(table: &RhoTable, s: f64, eps: f64) -> HelperIntegrals {
    helper_integrals_with(&|u: f64| table.eval(u), table.step(), s, eps)
}

pub fn helper_integrals_with<F: Fn(f64) -> f64>(
    rho: &F,
    step: f64,
    s: f64,
    eps: f64,
) -> HelperIntegrals {
    if eps == 0.0 {
        return HelperIntegrals {
            i: 0.0,
            ii: 0.0,
            j: 0.0,
            jj: 0.0,
        };
    }
    let panels = 2 * ((eps.abs() / (0.25 * step)).ceil() as usize).max(16);
    let f = |g: &dyn Fn(f64) -> f64| simpson(&|u: f64| g(u) * rho(s + u), 0.0, eps, panels);
    HelperIntegrals {
        i: f(&|_| 1.0),
        j: f(&|u| u),
        ii: f(&|u| eps - u),
        jj: f(&|u| (eps - u) * u),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointKind {
    RhoPositive,
    INull,
    IPositive,
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointKind::RhoPositive => "rho_positive",
            PointKind::INull => "i_null",
            PointKind::IPositive => "i_positive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointClass {
    pub kind: PointKind,
    pub rho: f64,
    /// `I_s(probe)`.
    pub i_plus: f64,
    /// `int_0^probe rho(s - u) du`.
    pub i_minus: f64,
}

pub fn classify_point(
    table: &RhoTable,
    s: f64,
    probe_eps: f64,
    rho_threshold: f64,
    null_tol: f64,
) -> PointClass {
    let rho = table.eval(s);
    let i_plus = helper_integrals(table, s, probe_eps).i;
    let i_minus = -helper_integrals(table, s, -probe_eps).i;
    let kind = if rho > rho_threshold {
        PointKind::RhoPositive
    } else if i_plus.max(i_minus) < null_tol {
        PointKind::INull
    } else {
        PointKind::IPositive
    };
    PointClass {
        kind,
        rho,
        i_plus,
        i_minus,
    }
}

/// `(eps_minus, eps_plus)` with `II_s(eps) = level` on each side.
pub fn invert_ii(table: &RhoTable, s: f64, level: f64) -> Result<(f64, f64)> {
    let reach = 0.25 * table.half_length();
    let ii = |e: f64| helper_integrals(table, s, e).ii;
    if !(level > 0.0) || ii(reach) < level || ii(-reach) < level {
        return Err(Error::LevelOutOfRange { s, level });
    }
    let plus = bisect(&|e: f64| ii(e) - level, 0.0, reach, 1e-12);
    let minus = bisect(&|e: f64| ii(e) - level, -reach, 0.0, 1e-12);
    Ok((minus, plus))
}

/// `psi'(s)` by the case split on the point class.
pub fn estimate_psi_prime<O: DistanceOracle + ?Sized>(
    oracle: &O,
    table: &RhoTable,
    s: f64,
    opts: &EstimatorOptions,
) -> Result<(PointClass, f64)> {
    check_schedule(&opts.schedule, oracle.half_length())?;
    let class = classify_point(table, s, opts.probe(), opts.rho_threshold, opts.null_tol);
    let value = match class.kind {
        PointKind::RhoPositive => {
            1.0 + 3.0 * short_chord_limit(oracle, s, class.rho, &opts.schedule)?
        }
        PointKind::INull => 1.0,
        PointKind::IPositive => {
            let mut steps = Vec::with_capacity(opts.schedule.len());
            let mut q = Vec::with_capacity(opts.schedule.len());
            let mut noise: f64 = 0.0;
            for &e in &opts.schedule {
                let level = helper_integrals(table, s, e).ii;
                let (em, ep) = invert_ii(table, s, level)?;
                let denom = helper_integrals(table, s, ep).jj - helper_integrals(table, s, em).jj;
                steps.push(ep);
                q.push((oracle.dist(s + ep, s + em) - (ep - em)) / denom);
                noise = noise.max(DIST_NOISE / denom);
            }
            1.0 + settled(s, &steps, &q, (4.0 * noise).max(1e-3))?
        }
    };
    Ok((class, value))
}

/// Extrapolated `(dist(s + eps, s - eps) - 2 eps) / (rho eps^3)`.
fn short_chord_limit<O: DistanceOracle + ?Sized>(
    oracle: &O,
    s: f64,
    rho: f64,
    schedule: &[f64],
) -> Result<f64> {
    let q: Vec<f64> = schedule
        .iter()
        .map(|&e| (oracle.dist(s + e, s - e) - 2.0 * e) / (rho * e * e * e))
        .collect();
    let finest = schedule[schedule.len() - 1];
    let noise = DIST_NOISE / (rho * finest.powi(3));
    settled(s, schedule, &q, (4.0 * noise).max(1e-3))
}

/// `psi'(s)` at a point with `rho(s) > 0`, omitting the factor 3 in front
/// of the short-chord limit. Kept only to show that the factor is needed.
pub fn estimate_psi_prime_uncorrected<O: DistanceOracle + ?Sized>(
    oracle: &O,
    table: &RhoTable,
    s: f64,
    schedule: &[f64],
) -> Result<f64> {
    Ok(1.0 + short_chord_limit(oracle, s, table.eval(s), schedule)?)
}

/// Quotient curvature and tangential curvature on the grid `s_k = k L / n`,
/// `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct TauEstimate {
    pub s: Vec<f64>,
    pub psi: Vec<f64>,
    pub tau: Vec<f64>,
    pub psi0: f64,
}

/// Integrates `psi'` from 0 and fixes `psi(0)` so that `tau = rho psi` has
/// zero integral over `[0, L]`. `rho` and `psi_prime` share the grid
/// `s_k = k L / n`, `k = 0..=n`.
pub fn estimate_tau(rho: &[f64], psi_prime: &[f64], half_length: f64) -> Result<TauEstimate> {
    let n = rho.len();
    if n < 3 || psi_prime.len() != n {
        return Err(Error::InvalidParameter(
            "rho and psi' grids must match and hold at least three points".into(),
        ));
    }
    let h = half_length / (n - 1) as f64;
    let big_psi = cumulative_trapezoid(psi_prime, h);
    let mass = trapezoid_samples(rho, h);
    if !(mass > 1e-10) {
        return Err(Error::DegenerateRho(mass));
    }
    let weighted: Vec<f64> = rho.iter().zip(&big_psi).map(|(r, p)| r * p).collect();
    let psi0 = -trapezoid_samples(&weighted, h) / mass;
    let psi: Vec<f64> = big_psi.iter().map(|p| psi0 + p).collect();
    let tau = rho.iter().zip(&psi).map(|(r, p)| r * p).collect();
    Ok(TauEstimate {
        s: (0..n).map(|k| h * k as f64).collect(),
        psi,
        tau,
        psi0,
    })
}

/// Full metric-only pipeline on the grid `s_k = k L / n`, `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct EstimateProfile {
    pub s: Vec<f64>,
    pub rho_hat: Vec<f64>,
    pub class: Vec<PointKind>,
    pub psi_prime_hat: Vec<f64>,
    pub psi_hat: Vec<f64>,
    pub tau_hat: Vec<f64>,
    pub half_length: f64,
}

pub fn estimate_profile<O: DistanceOracle + ?Sized>(
    oracle: &O,
    opts: &EstimatorOptions,
) -> Result<EstimateProfile> {
    let l = oracle.half_length();
    check_schedule(&opts.schedule, l)?;
    let n = opts.grid.max(16);
    let table = RhoTable::estimate(oracle, n, &opts.schedule)?;
    let s: Vec<f64> = (0..=n).map(|k| l * k as f64 / n as f64).collect();
    let rho_hat: Vec<f64> = (0..=n).map(|k| table.values()[k % n]).collect();
    let rows = s
        .par_iter()
        .map(|&si| estimate_psi_prime(oracle, &table, si, opts))
        .collect::<Result<Vec<_>>>()?;
    let psi_prime_hat: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let tau = estimate_tau(&rho_hat, &psi_prime_hat, l)?;
    Ok(EstimateProfile {
        class: rows.iter().map(|r| r.0.kind).collect(),
        s,
        rho_hat,
        psi_prime_hat,
        psi_hat: tau.psi,
        tau_hat: tau.tau,
        half_length: l,
    })
}
