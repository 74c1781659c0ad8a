//! 2x2 matrices over plain reals or jets.
//!
//! Endomorphisms of the tangent plane are stored in the chart basis:
//! `m[a][b]` is the `a`-th component of the image of `∂_b`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::jets::Jet2;

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> f64 {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for Jet2 {
    fn from_f64(x: f64) -> Jet2 {
        Jet2::scalar(x)
    }
    fn to_f64(self) -> f64 {
        self.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    pub fn new(m00: T, m01: T, m10: T, m11: T) -> Self {
        Mat2([[m00, m01], [m10, m11]])
    }

    pub fn identity() -> Self {
        let (o, z) = (T::from_f64(1.0), T::from_f64(0.0));
        Mat2::new(o, z, z, o)
    }

    pub fn zeros() -> Self {
        let z = T::from_f64(0.0);
        Mat2::new(z, z, z, z)
    }

    pub fn diag(a: T, b: T) -> Self {
        let z = T::from_f64(0.0);
        Mat2::new(a, z, z, b)
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        Mat2([[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]])
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize) -> T {
        self.0[a][b]
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn transpose(&self) -> Self {
        Mat2::from_fn(|a, b| self.0[b][a])
    }

    /// Adjugate; `m * m.adjugate() = det(m) I`.
    pub fn adjugate(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[1][1], -m[0][1], -m[1][0], m[0][0])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        Mat2::from_fn(|a, b| self.0[a][0] * rhs.0[0][b] + self.0[a][1] * rhs.0[1][b])
    }

    pub fn apply(&self, w: [T; 2]) -> [T; 2] {
        [
            self.0[0][0] * w[0] + self.0[0][1] * w[1],
            self.0[1][0] * w[0] + self.0[1][1] * w[1],
        ]
    }

    pub fn scale(&self, s: T) -> Self {
        Mat2::from_fn(|a, b| self.0[a][b] * s)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Mat2::from_fn(|a, b| self.0[a][b] + rhs.0[a][b])
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Mat2::from_fn(|a, b| self.0[a][b] - rhs.0[a][b])
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Mat2<U> {
        Mat2::from_fn(|a, b| f(self.0[a][b]))
    }

    pub fn values(&self) -> Mat2<f64> {
        self.map(|x| x.to_f64())
    }

    /// Bilinear form `x^T m y`.
    pub fn form(&self, x: [T; 2], y: [T; 2]) -> T {
        let my = self.apply(y);
        x[0] * my[0] + x[1] * my[1]
    }
}

impl Mat2<f64> {
    pub fn inverse(&self) -> Option<Mat2<f64>> {
        let d = self.det();
        if d.abs() <= 1e-300 {
            return None;
        }
        Some(self.adjugate().scale(1.0 / d))
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Eigenvalues of an endomorphism with real spectrum, ascending.
    /// A slightly negative discriminant from roundoff is clamped to zero.
    pub fn real_eigenvalues(&self) -> [f64; 2] {
        let half = 0.5 * self.trace();
        let disc = (half * half - self.det()).max(0.0).sqrt();
        [half - disc, half + disc]
    }
}

/// Squared norm of chart-component vector `w` in the metric `g`.
pub fn g_norm_sq(g: &Mat2<f64>, w: [f64; 2]) -> f64 {
    g.form(w, w)
}

pub fn g_norm(g: &Mat2<f64>, w: [f64; 2]) -> f64 {
    g_norm_sq(g, w).max(0.0).sqrt()
}

/// `|g m - (g m)^T|`, the failure of `m` to be self-adjoint with respect to `g`.
pub fn self_adjoint_defect(g: &Mat2<f64>, m: &Mat2<f64>) -> f64 {
    let gm = g.matmul(m);
    (gm.at(0, 1) - gm.at(1, 0)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_eigenvalues() {
        let m = Mat2::new(2.0, 1.0, 1.0, 2.0);
        let inv = m.inverse().unwrap();
        let id = m.matmul(&inv);
        assert!((id.at(0, 0) - 1.0).abs() < 1e-15 && id.at(0, 1).abs() < 1e-15);
        assert_eq!(m.real_eigenvalues(), [1.0, 3.0]);
        assert!(Mat2::new(1.0, 2.0, 2.0, 4.0).inverse().is_none());
    }

    #[test]
    fn self_adjointness_is_metric_relative() {
        // diag(1,4) metric; m maps d_u -> d_v / 4 and d_v -> d_u.
        let g = Mat2::diag(1.0, 4.0);
        let m = Mat2::new(0.0, 1.0, 0.25, 0.0);
        assert!(self_adjoint_defect(&g, &m) < 1e-15);
        assert!(self_adjoint_defect(&Mat2::identity(), &m) > 0.5);
    }
}
