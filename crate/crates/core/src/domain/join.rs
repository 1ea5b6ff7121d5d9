//! Projective joins: the union of open segments between two placed factors.

use crate::error::{GeometryError, Result};
use nalgebra::{DMatrix, DVector};

use super::{ConvexDomain, Membership};

/// Affine placement of a factor: the support is offset + span(basis).
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub offset: Vec<f64>,
    /// One column per intrinsic coordinate of the factor.
    pub basis: Vec<Vec<f64>>,
}

impl Placement {
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let mut out = self.offset.clone();
        for (col, zi) in self.basis.iter().zip(z) {
            for (o, c) in out.iter_mut().zip(col) {
                *o += zi * c;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Join {
    p1: Placement,
    d1: Box<ConvexDomain>,
    p2: Placement,
    d2: Box<ConvexDomain>,
    ambient: usize,
    /// Columns: (a1 - a2), basis of factor 1, basis of factor 2.
    m: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

/// Join of two domains placed on disjoint projective supports.
pub fn convex_sum(
    d1: ConvexDomain,
    p1: Placement,
    d2: ConvexDomain,
    p2: Placement,
) -> Result<ConvexDomain> {
    let n = p1.offset.len();
    if p2.offset.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, got: p2.offset.len() });
    }
    for (d, p) in [(&d1, &p1), (&d2, &p2)] {
        if p.basis.len() != d.ambient_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: d.ambient_dim(),
                got: p.basis.len(),
            });
        }
        if p.basis.iter().any(|c| c.len() != n) {
            return Err(GeometryError::Invalid("placement basis has wrong length".into()));
        }
    }
    let m1 = p1.basis.len();
    let m2 = p2.basis.len();
    // Disjointness of the projective supports: the homogeneous spans must be
    // independent, i.e. the stacked lift has rank (m1+1) + (m2+1).
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for b in p1.basis.iter().chain(p2.basis.iter()) {
        let mut c = b.clone();
        c.push(0.0);
        cols.push(c);
    }
    for a in [&p1.offset, &p2.offset] {
        let mut c = a.clone();
        c.push(1.0);
        cols.push(c);
    }
    let lift = DMatrix::from_fn(n + 1, cols.len(), |i, j| cols[j][i]);
    if numeric_rank(&lift) != m1 + m2 + 2 {
        return Err(GeometryError::SupportsNotDisjoint);
    }
    let mut mcols: Vec<Vec<f64>> = Vec::with_capacity(1 + m1 + m2);
    mcols.push(
        p1.offset
            .iter()
            .zip(&p2.offset)
            .map(|(a, b)| a - b)
            .collect(),
    );
    mcols.extend(p1.basis.iter().cloned());
    mcols.extend(p2.basis.iter().cloned());
    let m = DMatrix::from_fn(n, mcols.len(), |i, j| mcols[j][i]);
    let pinv = m
        .clone()
        .svd(true, true)
        .pseudo_inverse(1e-12)
        .map_err(|e| GeometryError::Invalid(e.to_string()))?;
    Ok(ConvexDomain::Join(Join {
        p1,
        d1: Box::new(d1),
        p2,
        d2: Box::new(d2),
        ambient: n,
        m,
        pinv,
    }))
}

fn numeric_rank(m: &DMatrix<f64>) -> usize {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > 1e-10 * max).count()
}

impl Join {
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.p1.basis.len() + self.p2.basis.len() + 1
    }

    pub fn factors(&self) -> (&ConvexDomain, &ConvexDomain) {
        (&self.d1, &self.d2)
    }

    pub fn witness(&self) -> Vec<f64> {
        let y1 = self.p1.apply(&self.d1.witness());
        let y2 = self.p2.apply(&self.d2.witness());
        y1.iter().zip(&y2).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Decompose x = mu*y1 + (1-mu)*y2 with y_i on the placed supports.
    /// Returns (mu, z1, z2, relative residual off the joined span).
    pub fn decompose(&self, x: &[f64]) -> (f64, Vec<f64>, Vec<f64>, f64) {
        let a2 = &self.p2.offset;
        let rhs = DVector::from_iterator(self.ambient, x.iter().zip(a2).map(|(xi, ai)| xi - ai));
        let v = &self.pinv * &rhs;
        let res = (&self.m * &v - &rhs).norm();
        let scale = 1.0 + rhs.norm();
        let mu = v[0];
        let m1 = self.p1.basis.len();
        let z1: Vec<f64> = if mu.abs() > 1e-12 {
            (0..m1).map(|i| v[1 + i] / mu).collect()
        } else {
            vec![0.0; m1]
        };
        let m2 = self.p2.basis.len();
        let z2: Vec<f64> = if (1.0 - mu).abs() > 1e-12 {
            (0..m2).map(|i| v[1 + m1 + i] / (1.0 - mu)).collect()
        } else {
            vec![0.0; m2]
        };
        (mu, z1, z2, res / scale)
    }

    /// Membership in the relative sense: the band applies within the joined
    /// span, and points measurably off the span are outside.
    pub fn defect(&self, x: &[f64]) -> f64 {
        let (mu, z1, z2, res) = self.decompose(x);
        let off_span = res - 1e-8;
        let mu_defect = (-mu).max(mu - 1.0);
        if mu <= 1e-12 || mu >= 1.0 - 1e-12 {
            return off_span.max(mu_defect).max(0.0).max(res);
        }
        off_span
            .max(mu_defect)
            .max(self.d1.defect(&z1))
            .max(self.d2.defect(&z2))
    }

    pub fn contains(&self, x: &[f64], eps: f64) -> Membership {
        let d = self.defect(x);
        if d < -eps {
            Membership::Interior
        } else if d <= eps {
            Membership::Boundary
        } else {
            Membership::Outside
        }
    }
}
