// SPDX-License-Identifier: Apache-2.0

//! Plane vectors, covectors and 2x2 matrices.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Euclidean length of the coordinate vector.
    pub fn coord_len(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// `det(self, other)`, the signed area of the parallelogram.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(self * v.x, self * v.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

/// A linear functional on the plane, stored as a row.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Covec2 {
    pub x: f64,
    pub y: f64,
}

impl Covec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn apply(self, v: Vec2) -> f64 {
        self.x * v.x + self.y * v.y
    }

    /// Pull back through a linear map: `(self ∘ m)(v) = self(m v)`.
    pub fn compose(self, m: Mat2) -> Covec2 {
        Covec2::new(self.x * m.a + self.y * m.c, self.x * m.b + self.y * m.d)
    }
}

/// Row-major 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_rows(rows: [[f64; 2]; 2]) -> Self {
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn rows(self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    /// Matrix whose columns are `u` and `v`.
    pub fn from_cols(u: Vec2, v: Vec2) -> Self {
        Self::new(u.x, v.x, u.y, v.y)
    }

    pub fn col(self, j: usize) -> Vec2 {
        match j {
            0 => Vec2::new(self.a, self.c),
            _ => Vec2::new(self.b, self.d),
        }
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(self) -> Option<Mat2> {
        let det = self.det();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if det.abs() <= 1e-300 || (det / (scale * scale)).abs() < 1e-15 {
            return None;
        }
        Some(Mat2::new(
            self.d / det,
            -self.b / det,
            -self.c / det,
            self.a / det,
        ))
    }

    pub fn transpose(self) -> Mat2 {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn max_abs(self) -> f64 {
        self.a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs())
    }

    /// Spectral condition number.
    pub fn condition_number(self) -> f64 {
        let (smax, smin) = self.singular_values();
        if smin == 0.0 {
            f64::INFINITY
        } else {
            smax / smin
        }
    }

    /// Singular values `(max, min)`.
    pub fn singular_values(self) -> (f64, f64) {
        let ata = self.transpose() * self;
        let tr = ata.a + ata.d;
        let det = ata.det().max(0.0);
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let l1 = 0.5 * tr + disc;
        let l2 = (0.5 * tr - disc).max(0.0);
        (l1.sqrt(), l2.sqrt())
    }

    pub fn rotation(angle: f64) -> Mat2 {
        let (s, c) = angle.sin_cos();
        Mat2::new(c, -s, s, c)
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        Mat2::new(
            self.a * m.a + self.b * m.c,
            self.a * m.b + self.b * m.d,
            self.c * m.a + self.d * m.c,
            self.c * m.b + self.d * m.d,
        )
    }
}

/// Solve `alpha * u + beta * v = w` by Cramer's rule. Returns `None` when
/// `|det(u, v)|` is below `min_det`.
pub fn solve_in_frame(u: Vec2, v: Vec2, w: Vec2, min_det: f64) -> Option<(f64, f64)> {
    let det = u.cross(v);
    if !(det.abs() >= min_det) {
        return None;
    }
    Some((w.cross(v) / det, u.cross(w) / det))
}
