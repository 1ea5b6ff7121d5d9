//! Homogeneous-coordinate arithmetic: points of RP^n, possibly-singular
//! projective maps, cross ratios, the affine embedding and limits of map
//! sequences in PM(n+1).

use crate::affine::AffineMap;
use crate::error::{GeometryError, Result};
use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for rank decisions.
const RANK_TOL: f64 = 1e-10;

/// A point of RP^n: a nonzero coordinate vector up to scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    coords: DVector<f64>,
}

impl ProjectivePoint {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.amax() == 0.0 {
            return Err(GeometryError::Invalid("zero homogeneous vector".into()));
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// Embed an affine point: (x_1, ..., x_n) -> [x_1 : ... : x_n : 1].
    pub fn from_affine(x: &[f64]) -> Self {
        let mut c = x.to_vec();
        c.push(1.0);
        ProjectivePoint {
            coords: DVector::from_vec(c),
        }
    }

    /// The infinity point of an affine direction: [u : 0].
    pub fn at_infinity(u: &[f64]) -> Result<Self> {
        let mut c = u.to_vec();
        c.push(0.0);
        Self::new(DVector::from_vec(c))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Projective dimension n of the ambient RP^n.
    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn is_at_infinity(&self, tol: f64) -> bool {
        let last = self.coords[self.coords.len() - 1].abs();
        last <= tol * self.coords.amax()
    }

    /// Affine chart coordinates, if the point is finite.
    pub fn to_affine(&self) -> Option<Vec<f64>> {
        let n = self.coords.len() - 1;
        let w = self.coords[n];
        if w.abs() <= 1e-14 * self.coords.amax() {
            return None;
        }
        Some((0..n).map(|i| self.coords[i] / w).collect())
    }

    /// Divide by the first entry of largest magnitude. Idempotent and constant
    /// on equality classes up to the overall sign convention.
    pub fn normalize(&self) -> ProjectivePoint {
        let mut idx = 0;
        let mut best = 0.0;
        for (i, v) in self.coords.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                idx = i;
            }
        }
        ProjectivePoint {
            coords: &self.coords / self.coords[idx],
        }
    }

    pub fn approx_eq(&self, other: &ProjectivePoint, tol: f64) -> bool {
        if self.coords.len() != other.coords.len() {
            return false;
        }
        let a = self.normalize();
        let b = other.normalize();
        (a.coords - b.coords).amax() <= tol
    }
}

/// Projectivized linear subspace of RP^n, spanned by `basis`.
#[derive(Debug, Clone)]
pub struct ProjectiveSubspace {
    basis: Vec<DVector<f64>>,
    ambient: usize,
}

impl ProjectiveSubspace {
    pub fn new(basis: Vec<DVector<f64>>, ambient: usize) -> Self {
        ProjectiveSubspace { basis, ambient }
    }

    pub fn empty(ambient: usize) -> Self {
        ProjectiveSubspace {
            basis: Vec::new(),
            ambient,
        }
    }

    pub fn basis(&self) -> &[DVector<f64>] {
        &self.basis
    }

    /// Projective dimension; -1 for the empty subspace.
    pub fn dim(&self) -> isize {
        self.basis.len() as isize - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn contains(&self, p: &ProjectivePoint, tol: f64) -> bool {
        if self.basis.is_empty() {
            return false;
        }
        let m = DMatrix::from_columns(&self.basis);
        let v = p.coords() / p.coords().norm();
        let sol = m.clone().svd(true, true).solve(&v, 1e-13).unwrap();
        (m * sol - v).norm() <= tol
    }

    /// Distance from the normalized coordinate vector to the span.
    pub fn residual(&self, p: &ProjectivePoint) -> f64 {
        if self.basis.is_empty() {
            return 1.0;
        }
        let m = DMatrix::from_columns(&self.basis);
        let v = p.coords() / p.coords().norm();
        let sol = m.clone().svd(true, true).solve(&v, 1e-13).unwrap();
        (m * sol - v).norm()
    }

    /// Whether every basis vector of `self` lies in `other`'s span.
    pub fn subspace_of(&self, other: &ProjectiveSubspace, tol: f64) -> bool {
        self.basis.iter().all(|b| {
            other.contains(
                &ProjectivePoint::new(b.clone()).expect("basis vectors are nonzero"),
                tol,
            )
        })
    }
}

/// An element of PM(n+1): an (n+1)x(n+1) matrix up to scale, possibly
/// singular, carrying its projectivized kernel and range.
#[derive(Debug, Clone)]
pub struct ProjectiveMap {
    matrix: DMatrix<f64>,
    rank: usize,
    kernel: ProjectiveSubspace,
    range: ProjectiveSubspace,
}

impl ProjectiveMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(GeometryError::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let n1 = matrix.nrows();
        let svd = matrix.clone().svd(true, true);
        let smax = svd.singular_values.max();
        if smax == 0.0 {
            return Err(GeometryError::RankZero);
        }
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > RANK_TOL * smax)
            .count();
        let u = svd.u.as_ref().expect("svd with u");
        let vt = svd.v_t.as_ref().expect("svd with v_t");
        let (kernel, range) = if rank == n1 {
            (ProjectiveSubspace::empty(n1 - 1), ProjectiveSubspace::empty(n1 - 1))
        } else {
            let kb = (rank..n1).map(|i| vt.row(i).transpose()).collect();
            let rb = (0..rank).map(|i| u.column(i).clone_owned()).collect();
            (
                ProjectiveSubspace::new(kb, n1 - 1),
                ProjectiveSubspace::new(rb, n1 - 1),
            )
        };
        Ok(ProjectiveMap {
            matrix,
            rank,
            kernel,
            range,
        })
    }

    pub fn identity(n: usize) -> Self {
        ProjectiveMap::new(DMatrix::identity(n + 1, n + 1)).expect("identity is nonsingular")
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Ambient projective dimension n.
    pub fn ambient_dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn is_singular(&self) -> bool {
        self.rank < self.matrix.nrows()
    }

    pub fn compose(&self, other: &ProjectiveMap) -> Result<ProjectiveMap> {
        ProjectiveMap::new(&self.matrix * &other.matrix)
    }

    pub fn inverse(&self) -> Result<ProjectiveMap> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| GeometryError::Invalid("singular projective map".into()))?;
        ProjectiveMap::new(inv)
    }

    /// Scale-invariant equality in PM(n+1).
    pub fn approx_eq(&self, other: &ProjectiveMap, tol: f64) -> bool {
        let a = normalize_matrix(&self.matrix);
        let b = normalize_matrix(&other.matrix);
        (a - b).amax() <= tol
    }
}

/// K(g) and R(g): projectivized kernel and range. Both empty for a
/// nonsingular map.
pub fn kernel_and_range(map: &ProjectiveMap) -> (ProjectiveSubspace, ProjectiveSubspace) {
    (map.kernel.clone(), map.range.clone())
}

/// Image of `p` under `map`; defined off K(map).
pub fn apply_map(map: &ProjectiveMap, p: &ProjectivePoint) -> Result<ProjectivePoint> {
    if p.coords().len() != map.matrix.nrows() {
        return Err(GeometryError::DimensionMismatch {
            expected: map.matrix.nrows() - 1,
            got: p.ambient_dim(),
        });
    }
    let img = &map.matrix * p.coords();
    let scale = map.matrix.amax() * p.coords().amax();
    if img.amax() <= 1e-10 * scale {
        return Err(GeometryError::PointInKernel);
    }
    Ok(ProjectivePoint { coords: img })
}

/// The equivariant embedding rho(A, a) = [[A, a], [0, 1]].
pub fn affine_embed(linear: &DMatrix<f64>, translation: &DVector<f64>) -> ProjectiveMap {
    let n = linear.nrows();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(linear);
    m.view_mut((0, n), (n, 1)).copy_from(translation);
    m[(n, n)] = 1.0;
    ProjectiveMap::new(m).expect("embedding matrix is nonzero")
}

pub fn affine_to_projective(f: &AffineMap) -> ProjectiveMap {
    affine_embed(&f.linear, &f.translation)
}

/// Whether the matrix fixes the hyperplane at infinity, i.e. has last row
/// proportional to (0, ..., 0, 1).
pub fn is_affine_shaped(map: &ProjectiveMap, tol: f64) -> bool {
    let m = normalize_matrix(&map.matrix);
    let n = m.nrows() - 1;
    (0..n).all(|j| m[(n, j)].abs() <= tol)
}

/// Cross ratio of four collinear projective points, as the nonnegative
/// extended real (|s2-p1| |s1-p2|) / (|s2-p2| |s1-p1|) in any affine
/// parameterization of the line.
pub fn cross_ratio(
    s1: &ProjectivePoint,
    s2: &ProjectivePoint,
    p1: &ProjectivePoint,
    p2: &ProjectivePoint,
) -> Result<f64> {
    let pts = [s1, s2, p1, p2];
    let d = s1.coords().len();
    for p in &pts {
        if p.coords().len() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d - 1,
                got: p.ambient_dim(),
            });
        }
    }
    let cols: Vec<DVector<f64>> = pts.iter().map(|p| p.coords() / p.coords().norm()).collect();
    let m = DMatrix::from_columns(&cols);
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if sv.iter().filter(|&&s| s > 1e-9 * smax).count() > 2 {
        return Err(GeometryError::NotCollinear);
    }

    // Coordinates on the line in the basis (s1, s2).
    let basis = DMatrix::from_columns(&cols[0..2]);
    let svd = basis.clone().svd(true, true);
    if svd.singular_values.min() <= 1e-9 * svd.singular_values.max() {
        return Err(GeometryError::DegenerateChord);
    }
    let coord = |v: &DVector<f64>| -> (f64, f64) {
        let c = svd.solve(v, 1e-13).expect("least squares");
        (c[0], c[1])
    };
    let (x1, y1) = coord(&cols[2]);
    let (x2, y2) = coord(&cols[3]);
    // In these coordinates s1 = (1,0), s2 = (0,1); parameter differences are
    // proportional to 2x2 determinants, and the chart factors cancel.
    let num = (x1 * y2).abs();
    let den = (x2 * y1).abs();
    let scale = x1.hypot(y1) * x2.hypot(y2);
    if den <= 1e-12 * scale {
        return Ok(f64::INFINITY);
    }
    if num <= 1e-12 * scale {
        return Ok(0.0);
    }
    Ok(num / den)
}

fn normalize_matrix(m: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = m.norm();
    let mut out = m / norm;
    let lead = out.iter().find(|v| v.abs() > 1e-9).copied().unwrap_or(1.0);
    if lead < 0.0 {
        out = -out;
    }
    out
}

/// Result of truncating a map sequence in PM(n+1).
#[derive(Debug, Clone)]
pub struct LimitOutcome {
    pub map: ProjectiveMap,
    pub converged: bool,
    pub last_delta: f64,
}

/// Normalize each matrix to unit Frobenius norm (sign fixed by the first
/// nonzero entry) and report the final iterate with a Cauchy-tail flag.
pub fn limit_of_sequence<I>(seq: I, steps: usize, tol: f64) -> Result<LimitOutcome>
where
    I: IntoIterator<Item = DMatrix<f64>>,
{
    let mut prev: Option<DMatrix<f64>> = None;
    let mut last_delta = f64::INFINITY;
    let mut taken = 0;
    for m in seq.into_iter().take(steps) {
        let norm = normalize_matrix(&m);
        if let Some(p) = &prev {
            last_delta = (&norm - p).norm();
        }
        prev = Some(norm);
        taken += 1;
    }
    let Some(final_m) = prev else {
        return Err(GeometryError::Invalid("empty sequence".into()));
    };
    let converged = taken >= 2 && last_delta < tol;
    Ok(LimitOutcome {
        map: ProjectiveMap::new(final_m)?,
        converged,
        last_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(c: &[f64]) -> ProjectivePoint {
        ProjectivePoint::from_slice(c).unwrap()
    }

    #[test]
    fn cross_ratio_real_line() {
        // Points of RP^1 as [x : 1].
        let s1 = pt(&[-1.0, 1.0]);
        let s2 = pt(&[1.0, 1.0]);
        let p = pt(&[0.0, 1.0]);
        assert_relative_eq!(cross_ratio(&s1, &s2, &p, &p).unwrap(), 1.0, epsilon = 1e-12);
        let q = pt(&[0.5, 1.0]);
        assert_relative_eq!(cross_ratio(&s1, &s2, &p, &q).unwrap(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn cross_ratio_infinite_and_errors() {
        let s1 = pt(&[-1.0, 1.0]);
        let s2 = pt(&[1.0, 1.0]);
        let p = pt(&[0.0, 1.0]);
        // Chord endpoints hit by the pair: the ratio degenerates to 0 or
        // infinity and |log| of either is an infinite Hilbert distance.
        assert!(cross_ratio(&s1, &s2, &p, &s1).unwrap().abs() < 1e-12);
        assert!(cross_ratio(&s1, &s2, &s1, &p).unwrap().is_infinite());
        assert_eq!(
            cross_ratio(&s1, &s1, &p, &p).unwrap_err(),
            GeometryError::DegenerateChord
        );
        let off = pt(&[0.0, 1.0, 1.0]);
        let a = pt(&[1.0, 0.0, 1.0]);
        let b = pt(&[2.0, 0.0, 1.0]);
        let c = pt(&[3.0, 0.0, 1.0]);
        assert_eq!(
            cross_ratio(&a, &b, &c, &off).unwrap_err(),
            GeometryError::NotCollinear
        );
    }

    #[test]
    fn apply_and_kernel() {
        let id = ProjectiveMap::identity(2);
        let p = pt(&[0.3, -2.0, 1.0]);
        assert!(apply_map(&id, &p).unwrap().approx_eq(&p, 1e-12));

        let t = ProjectiveMap::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
            1.0, 0.0, 0.0,
        ])))
        .unwrap();
        let q = apply_map(&t, &pt(&[1.0, 1.0, 0.0])).unwrap();
        assert!(q.approx_eq(&pt(&[1.0, 0.0, 0.0]), 1e-12));
        assert_eq!(
            apply_map(&t, &pt(&[0.0, 1.0, 2.0])).unwrap_err(),
            GeometryError::PointInKernel
        );

        let (k, r) = kernel_and_range(&t);
        assert_eq!(k.dim(), 1);
        assert_eq!(r.dim(), 0);
        assert!(k.contains(&pt(&[0.0, 2.0, -1.0]), 1e-9));
        assert!(r.contains(&pt(&[1.0, 0.0, 0.0]), 1e-9));
        let (ki, ri) = kernel_and_range(&id);
        assert_eq!(ki.dim(), -1);
        assert_eq!(ri.dim(), -1);
    }

    #[test]
    fn kernel_range_dims_sum() {
        // (dim K + 1) + (dim R + 1) = n + 1 for singular maps.
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = 1.0;
        m[(1, 1)] = 2.0;
        let t = ProjectiveMap::new(m).unwrap();
        let (k, r) = kernel_and_range(&t);
        assert_eq!((k.dim() + 1) + (r.dim() + 1), 4);
        assert_eq!(r.dim(), 1);
    }

    #[test]
    fn embed_translation() {
        let a = DVector::from_vec(vec![2.0, -1.0]);
        let t = affine_embed(&DMatrix::identity(2, 2), &a);
        let x = pt(&[0.5, 0.5, 1.0]);
        let y = apply_map(&t, &x).unwrap();
        assert!(y.approx_eq(&pt(&[2.5, -0.5, 1.0]), 1e-12));
        assert!(is_affine_shaped(&t, 1e-12));
    }

    #[test]
    fn limits() {
        let constant = (0..10).map(|_| DMatrix::identity(3, 3));
        let out = limit_of_sequence(constant, 10, 1e-9).unwrap();
        assert!(out.converged);
        assert!(!out.map.is_singular());

        // diag(2^k, 1) -> diag(1, 0) after normalization.
        let seq = (0..60).map(|k| {
            DMatrix::from_diagonal(&DVector::from_vec(vec![2f64.powi(k), 1.0]))
        });
        let out = limit_of_sequence(seq, 60, 1e-9).unwrap();
        assert!(out.converged);
        let (k, r) = kernel_and_range(&out.map);
        assert!(k.contains(&pt(&[0.0, 1.0]), 1e-8));
        assert!(r.contains(&pt(&[1.0, 0.0]), 1e-8));

        let alternating = (0..40).map(|k| {
            let th: f64 = if k % 2 == 0 { 0.3 } else { 1.2 };
            DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()])
        });
        assert!(!limit_of_sequence(alternating, 40, 1e-9).unwrap().converged);
    }
}
