// SPDX-License-Identifier: Apache-2.0

//! Piecewise-cubic interpolants used for tabulated curves and coefficients.

use crate::error::{Error, Result};

/// Cubic Hermite interpolant on sorted, possibly non-uniform knots, with
/// slopes limited by the Fritsch-Carlson rule so monotone data stays monotone.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant. When `slopes` is `None` they are estimated
    /// from the data by three-point differences.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, slopes: Option<Vec<f64>>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(Error::InvalidParameter(
                "monotone cubic needs at least two knots with matching values".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "knots must be strictly increasing".into(),
            ));
        }
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut m = match slopes {
            Some(s) if s.len() == n => s,
            Some(_) => return Err(Error::InvalidParameter("slope count mismatch".into())),
            None => {
                let mut m = vec![0.0; n];
                m[0] = secants[0];
                m[n - 1] = secants[n - 2];
                for i in 1..n - 1 {
                    let h0 = xs[i] - xs[i - 1];
                    let h1 = xs[i + 1] - xs[i];
                    m[i] = (h1 * secants[i - 1] + h0 * secants[i]) / (h0 + h1);
                }
                m
            }
        };
        for (i, &d) in secants.iter().enumerate() {
            if d == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
                continue;
            }
            if m[i] / d < 0.0 {
                m[i] = 0.0;
            }
            if m[i + 1] / d < 0.0 {
                m[i + 1] = 0.0;
            }
            let a = m[i] / d;
            let b = m[i + 1] / d;
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let k = 3.0 / r2.sqrt();
                m[i] = k * a * d;
                m[i + 1] = k * b * d;
            }
        }
        Ok(Self { xs, ys, slopes: m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    /// Index `i` of the interval `[x_i, x_{i+1}]` containing `x` (clamped).
    pub fn interval(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.interval(x);
        hermite(
            self.xs[i],
            self.xs[i + 1],
            self.ys[i],
            self.ys[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
            x,
        )
        .0
    }

    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let i = self.interval(x);
        hermite(
            self.xs[i],
            self.xs[i + 1],
            self.ys[i],
            self.ys[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
            x,
        )
    }
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, m0: f64, m1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
    let d00 = 6.0 * t2 - 6.0 * t;
    let d10 = 3.0 * t2 - 4.0 * t + 1.0;
    let d01 = -6.0 * t2 + 6.0 * t;
    let d11 = 3.0 * t2 - 2.0 * t;
    let deriv = (d00 * y0 + d01 * y1) / h + d10 * m0 + d11 * m1;
    (value, deriv)
}

/// How a [`GridFunction`] fills in between samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridInterpolation {
    /// Hermite cubic with centred-difference slopes (exact for quadratics).
    Cubic,
    /// Same slopes passed through the Fritsch-Carlson limiter.
    MonotoneCubic,
}

/// Uniformly sampled function of one variable, optionally periodic.
///
/// For a periodic function `values` holds one period: sample `k` sits at
/// `start + k * step` and `period == values.len() * step`.
#[derive(Debug, Clone)]
pub struct GridFunction {
    start: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    periodic: bool,
}

impl GridFunction {
    pub fn new(
        start: f64,
        step: f64,
        values: Vec<f64>,
        periodic: bool,
        kind: GridInterpolation,
    ) -> Result<Self> {
        let n = values.len();
        if n < 3 || !(step > 0.0) {
            return Err(Error::InvalidParameter(
                "grid function needs at least three samples and a positive step".into(),
            ));
        }
        let at = |k: isize| -> f64 {
            if periodic {
                values[k.rem_euclid(n as isize) as usize]
            } else {
                values[k.clamp(0, n as isize - 1) as usize]
            }
        };
        let mut slopes: Vec<f64> = (0..n as isize)
            .map(|k| {
                if periodic || (k > 0 && k < n as isize - 1) {
                    (at(k + 1) - at(k - 1)) / (2.0 * step)
                } else if k == 0 {
                    (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * step)
                } else {
                    let m = n as isize - 1;
                    (3.0 * at(m) - 4.0 * at(m - 1) + at(m - 2)) / (2.0 * step)
                }
            })
            .collect();
        if kind == GridInterpolation::MonotoneCubic {
            let intervals = if periodic { n } else { n - 1 };
            for i in 0..intervals {
                let j = (i + 1) % n;
                let d = (values[j] - values[i]) / step;
                if d == 0.0 {
                    slopes[i] = 0.0;
                    slopes[j] = 0.0;
                    continue;
                }
                if slopes[i] / d < 0.0 {
                    slopes[i] = 0.0;
                }
                if slopes[j] / d < 0.0 {
                    slopes[j] = 0.0;
                }
                let a = slopes[i] / d;
                let b = slopes[j] / d;
                let r2 = a * a + b * b;
                if r2 > 9.0 {
                    let k = 3.0 / r2.sqrt();
                    slopes[i] = k * a * d;
                    slopes[j] = k * b * d;
                }
            }
        }
        Ok(Self {
            start,
            step,
            values,
            slopes,
            periodic,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn period(&self) -> Option<f64> {
        self.periodic
            .then_some(self.step * self.values.len() as f64)
    }

    /// Right end of the sampled range (non-periodic grids).
    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let u = (x - self.start) / self.step;
        let (i, j, frac) = if self.periodic {
            let nf = n as f64;
            let w = u.rem_euclid(nf);
            let i = (w.floor() as usize).min(n - 1);
            (i, (i + 1) % n, w - i as f64)
        } else {
            let i = (u.floor().max(0.0) as usize).min(n - 2);
            (i, i + 1, u - i as f64)
        };
        let (v, _) = hermite(
            0.0,
            1.0,
            self.values[i],
            self.values[j],
            self.slopes[i] * self.step,
            self.slopes[j] * self.step,
            frac,
        );
        v
    }
}

/// Periodic cubic spline through non-uniform samples `(x_i, y_i)` on one
/// period. Used for user-supplied radial profiles.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
    period: f64,
}

impl PeriodicSpline {
    pub fn new(mut samples: Vec<(f64, f64)>, period: f64) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::InvalidParameter(
                "periodic spline needs at least four samples".into(),
            ));
        }
        for s in samples.iter_mut() {
            s.0 = s.0.rem_euclid(period);
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParameter(
                "sample abscissae must be distinct modulo the period".into(),
            ));
        }
        let n = samples.len();
        let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let h: Vec<f64> = (0..n)
            .map(|i| {
                if i + 1 < n {
                    xs[i + 1] - xs[i]
                } else {
                    xs[0] + period - xs[n - 1]
                }
            })
            .collect();
        // Cyclic tridiagonal system for the second derivatives M_i:
        // h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1} = rhs_i.
        let prev = |i: usize| (i + n - 1) % n;
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let hp = h[prev(i)];
            let hi = h[i];
            sub[i] = hp;
            diag[i] = 2.0 * (hp + hi);
            sup[i] = hi;
            let yn = ys[(i + 1) % n];
            let yp = ys[prev(i)];
            rhs[i] = 6.0 * ((yn - ys[i]) / hi - (ys[i] - yp) / hp);
        }
        let second = solve_cyclic(&sub, &diag, &sup, &rhs);
        Ok(Self {
            xs,
            ys,
            second,
            period,
        })
    }

    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let n = self.xs.len();
        let w = x.rem_euclid(self.period);
        let p = self.xs.partition_point(|&k| k <= w);
        let i = if p == 0 { n - 1 } else { p - 1 };
        let x0 = self.xs[i];
        let x1 = if i + 1 < n {
            self.xs[i + 1]
        } else {
            self.xs[0] + self.period
        };
        let w = if w < x0 { w + self.period } else { w };
        (i, x1 - x0, w - x0)
    }

    /// Value and first derivative at `x`.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let n = self.xs.len();
        let (i, h, dx) = self.locate(x);
        let j = (i + 1) % n;
        let (y0, y1) = (self.ys[i], self.ys[j]);
        let (m0, m1) = (self.second[i], self.second[j]);
        let a = (h - dx) / h;
        let b = dx / h;
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let deriv =
            (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        (value, deriv)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }
}

/// Solves a cyclic tridiagonal system (Sherman-Morrison on top of Thomas).
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let alpha = sup[n - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(sub, &d, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(sub, &d, sup, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter()
        .zip(z.iter())
        .map(|(xi, zi)| xi - fact * zi)
        .collect()
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn monotone_cubic_preserves_monotonicity() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.1, 3.0, 3.05, 10.0];
        let mc = MonotoneCubic::new(xs, ys, None).unwrap();
        let mut last = f64::NEG_INFINITY;
        for k in 0..=400 {
            let v = mc.eval(k as f64 * 0.01);
            assert!(v >= last - 1e-15);
            last = v;
        }
    }

    #[test]
    fn grid_cubic_reproduces_quadratics() {
        let f = |x: f64| 0.5 * x * x - x + 2.0;
        let vals: Vec<f64> = (0..50).map(|k| f(-1.0 + 0.1 * k as f64)).collect();
        let g = GridFunction::new(-1.0, 0.1, vals, false, GridInterpolation::Cubic).unwrap();
        for k in 0..400 {
            let x = -1.0 + 0.0121 * k as f64;
            assert!((g.eval(x) - f(x)).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn periodic_grid_wraps() {
        let n = 256;
        let step = 2.0 * PI / n as f64;
        let vals: Vec<f64> = (0..n).map(|k| (k as f64 * step).cos()).collect();
        let g = GridFunction::new(0.0, step, vals, true, GridInterpolation::MonotoneCubic).unwrap();
        for x in [-7.0, -0.3, 0.0, 1.234, 6.2, 13.0] {
            assert!((g.eval(x) - f64::cos(x)).abs() < 1e-5, "x = {x}");
        }
    }

    #[test]
    fn periodic_spline_fits_trig() {
        let n = 64;
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64 + 0.01 * (k % 3) as f64;
                (t, (2.0 * t).sin() + 3.0)
            })
            .collect();
        let s = PeriodicSpline::new(samples, 2.0 * PI).unwrap();
        for k in 0..500 {
            let x = -3.0 + 0.037 * k as f64;
            let (v, d) = s.eval_with_derivative(x);
            assert!((v - ((2.0 * x).sin() + 3.0)).abs() < 1e-4);
            assert!((d - 2.0 * (2.0 * x).cos()).abs() < 5e-3);
        }
    }
}
