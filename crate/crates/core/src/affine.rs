//! Invertible (and general) affine maps `x -> Ax + a`.

use crate::error::{GeometryError, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub linear: DMatrix<f64>,
    pub translation: DVector<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        if linear.nrows() != linear.ncols() || linear.nrows() != translation.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: linear.nrows(),
                got: translation.len(),
            });
        }
        Ok(AffineMap { linear, translation })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: DMatrix::identity(n, n),
            translation: DVector::zeros(n),
        }
    }

    pub fn translation_by(a: DVector<f64>) -> Self {
        let n = a.len();
        AffineMap {
            linear: DMatrix::identity(n, n),
            translation: a,
        }
    }

    pub fn linear_map(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        AffineMap {
            linear: m,
            translation: DVector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.linear * x + &self.translation
    }

    pub fn apply_slice(&self, x: &[f64]) -> Vec<f64> {
        self.apply(&DVector::from_column_slice(x)).iter().copied().collect()
    }

    /// self after other: (self . other)(x) = self(other(x)).
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.linear.clone().determinant()
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let inv = self
            .linear
            .clone()
            .try_inverse()
            .ok_or_else(|| GeometryError::Invalid("affine map is singular".into()))?;
        let t = -(&inv * &self.translation);
        Ok(AffineMap {
            linear: inv,
            translation: t,
        })
    }

    pub fn is_invertible(&self) -> bool {
        self.determinant().abs() > 1e-12
    }
}
