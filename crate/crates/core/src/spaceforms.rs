//! Flat models of the product spaces `M^n(κ) × ℝ`.
//!
//! * `κ > 0`: the sphere `|x|² = 1/κ` in `ℝ^{n+1}`, times `ℝ`.
//! * `κ < 0`: the upper sheet of the hyperboloid `⟨x,x⟩ = 1/κ` in Minkowski
//!   space `ℝ^{n,1}` (first coordinate timelike), times `ℝ`.
//! * `κ = 0`: `ℝ^n × ℝ`, no constraint.
//!
//! The `ℝ` factor is always the last flat coordinate. The Levi-Civita
//! connection of the product is componentwise flat differentiation followed
//! by [`AmbientModel::project_to_product_tangent`].

use serde::Serialize;
use thiserror::Error;

use crate::linalg::Scalar;

/// Inputs farther than this from the model are rejected.
pub const CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceFormError {
    #[error("space form dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("curvature must be finite, got {0}")]
    NonFiniteCurvature(f64),
    #[error("vector has length {got}, model expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("the flat model of a zero-curvature space has no constraint")]
    NoConstraint,
    #[error("point is off the model (constraint residual {0:e})")]
    OffModel(f64),
    #[error("point is on the lower sheet of the hyperboloid")]
    LowerSheet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbientModel {
    pub kappa: f64,
    pub n: usize,
    pub flat_dim: usize,
    pub signature: Vec<f64>,
    pub t_index: usize,
}

impl AmbientModel {
    pub fn new(kappa: f64, n: usize) -> Result<AmbientModel, SpaceFormError> {
        if n < 2 {
            return Err(SpaceFormError::DimensionTooSmall(n));
        }
        if !kappa.is_finite() {
            return Err(SpaceFormError::NonFiniteCurvature(kappa));
        }
        let flat_dim = if kappa == 0.0 { n + 1 } else { n + 2 };
        let mut signature = vec![1.0; flat_dim];
        if kappa < 0.0 {
            signature[0] = -1.0;
        }
        Ok(AmbientModel {
            kappa,
            n,
            flat_dim,
            signature,
            t_index: flat_dim - 1,
        })
    }

    /// Dimension of `M^n(κ) × ℝ`.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Normal-space dimension of a surface in this ambient.
    pub fn codim(&self) -> usize {
        self.n - 1
    }

    fn check_len(&self, len: usize) -> Result<(), SpaceFormError> {
        if len != self.flat_dim {
            Err(SpaceFormError::LengthMismatch {
                expected: self.flat_dim,
                got: len,
            })
        } else {
            Ok(())
        }
    }

    pub fn flat_inner(&self, x: &[f64], y: &[f64]) -> Result<f64, SpaceFormError> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(self.inner(x, y))
    }

    /// Signed flat inner product without length checks.
    pub fn inner<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
        let mut acc = T::from_f64(0.0);
        for ((a, b), s) in x.iter().zip(y).zip(&self.signature) {
            acc = acc + (*a * *b) * *s;
        }
        acc
    }

    /// Same as [`inner`](Self::inner) restricted to the space-form coordinates.
    pub fn inner_space<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
        let mut acc = T::from_f64(0.0);
        for k in 0..self.t_index {
            acc = acc + (x[k] * y[k]) * self.signature[k];
        }
        acc
    }

    /// `⟨p_M, p_M⟩ − 1/κ`, where `p_M` drops the `ℝ` coordinate.
    pub fn constraint_residual(&self, p: &[f64]) -> Result<f64, SpaceFormError> {
        if self.kappa == 0.0 {
            return Err(SpaceFormError::NoConstraint);
        }
        self.check_len(p.len())?;
        Ok(self.inner_space(p, p) - 1.0 / self.kappa)
    }

    /// Checks that `p` lies on the model to [`CONSTRAINT_TOL`].
    pub fn check_point(&self, p: &[f64]) -> Result<(), SpaceFormError> {
        self.check_len(p.len())?;
        if self.kappa == 0.0 {
            return Ok(());
        }
        let r = self.constraint_residual(p)?;
        if r.abs() > CONSTRAINT_TOL {
            return Err(SpaceFormError::OffModel(r));
        }
        if self.kappa < 0.0 && p[0] <= 0.0 {
            return Err(SpaceFormError::LowerSheet);
        }
        Ok(())
    }

    /// Removes from `w` its component along the position normal `p_M`.
    pub fn project_to_product_tangent(
        &self,
        p: &[f64],
        w: &[f64],
    ) -> Result<Vec<f64>, SpaceFormError> {
        self.check_point(p)?;
        self.check_len(w.len())?;
        Ok(self.project(p, w))
    }

    /// Unchecked projection `w − κ⟨w, p_M⟩ p_M`, generic over scalars.
    pub fn project<T: Scalar>(&self, p: &[T], w: &[T]) -> Vec<T> {
        if self.kappa == 0.0 {
            return w.to_vec();
        }
        let c = self.inner_space(w, p) * self.kappa;
        w.iter()
            .enumerate()
            .map(|(k, wk)| {
                if k == self.t_index {
                    *wk
                } else {
                    *wk - c * p[k]
                }
            })
            .collect()
    }

    /// Unit vector of the `ℝ` factor.
    pub fn vertical(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.flat_dim];
        e[self.t_index] = 1.0;
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_shapes() {
        let s = AmbientModel::new(1.0, 2).unwrap();
        assert_eq!(s.flat_dim, 4);
        assert!(s.signature.iter().all(|x| *x == 1.0));
        let h = AmbientModel::new(-1.0, 2).unwrap();
        assert_eq!(h.signature, vec![-1.0, 1.0, 1.0, 1.0]);
        assert_eq!(h.t_index, 3);
        let e = AmbientModel::new(0.0, 3).unwrap();
        assert_eq!(e.flat_dim, 4);
        assert_eq!(
            AmbientModel::new(1.0, 1),
            Err(SpaceFormError::DimensionTooSmall(1))
        );
    }

    #[test]
    fn inner_products() {
        let h = AmbientModel::new(-1.0, 2).unwrap();
        let x = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(h.flat_inner(&x, &x).unwrap(), -1.0);
        let s = AmbientModel::new(1.0, 2).unwrap();
        assert_eq!(s.flat_inner(&x, &[0.0, 1.0, 0.0, 0.0]).unwrap(), 0.0);
        let e = AmbientModel::new(0.0, 3).unwrap();
        let y = [3.0, 4.0, 0.0, 0.0];
        assert_eq!(e.flat_inner(&y, &y).unwrap(), 25.0);
        assert!(matches!(
            e.flat_inner(&y, &[1.0]),
            Err(SpaceFormError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn constraint_residuals() {
        let s = AmbientModel::new(1.0, 2).unwrap();
        assert_eq!(s.constraint_residual(&[1.0, 0.0, 0.0, 5.0]).unwrap(), 0.0);
        assert_eq!(s.constraint_residual(&[2.0, 0.0, 0.0, 0.0]).unwrap(), 3.0);
        let h = AmbientModel::new(-1.0, 2).unwrap();
        assert_eq!(h.constraint_residual(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        let e = AmbientModel::new(0.0, 2).unwrap();
        assert_eq!(
            e.constraint_residual(&[0.0; 3]),
            Err(SpaceFormError::NoConstraint)
        );
    }

    #[test]
    fn projections() {
        let s = AmbientModel::new(1.0, 2).unwrap();
        let w = s
            .project_to_product_tangent(&[0.0, 0.0, 1.0, 7.0], &[1.0, 0.0, 1.0, 0.0])
            .unwrap();
        assert_eq!(w, vec![1.0, 0.0, 0.0, 0.0]);

        // Tangent space of the hyperboloid at its vertex is {x0 = 0}.
        let h = AmbientModel::new(-1.0, 2).unwrap();
        let w = h
            .project_to_product_tangent(&[1.0, 0.0, 0.0, 0.0], &[1.0, 1.0, 0.0, 0.0])
            .unwrap();
        assert_eq!(w, vec![0.0, 1.0, 0.0, 0.0]);

        assert!(matches!(
            s.project_to_product_tangent(&[1.1, 0.0, 0.0, 0.0], &[0.0; 4]),
            Err(SpaceFormError::OffModel(_))
        ));
        assert_eq!(
            h.project_to_product_tangent(&[-1.0, 0.0, 0.0, 0.0], &[0.0; 4]),
            Err(SpaceFormError::LowerSheet)
        );
    }
}
