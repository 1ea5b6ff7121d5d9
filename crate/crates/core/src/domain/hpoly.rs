//! Open polyhedra {x : Ax < b} over exact rationals, plus convex hulls.

use crate::error::{GeometryError, Result};
use crate::rat::{dot, rat_to_f64, vec_to_f64, Rat, RatMat};
use crate::simplex::{solve_lp, LpResult};
use num_traits::{One, Signed, Zero};

use super::Membership;

#[derive(Debug, Clone, PartialEq)]
pub struct HPoly {
    a: RatMat,
    b: Vec<Rat>,
    witness: Vec<Rat>,
}

impl HPoly {
    /// Build {x : Ax < b}; rejects empty interiors. Rows with a zero normal
    /// are dropped when vacuous and rejected when unsatisfiable.
    pub fn new(a: RatMat, b: Vec<Rat>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        let n = a.ncols;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (row, bi) in a.rows.iter().zip(&b) {
            if row.iter().all(|x| x.is_zero()) {
                if bi.is_positive() {
                    continue;
                }
                return Err(GeometryError::EmptyInterior);
            }
            rows.push(row.clone());
            rhs.push(bi.clone());
        }
        let a = RatMat::new(rows, n);
        let witness = interior_point(&a, &rhs)?;
        Ok(HPoly { a, b: rhs, witness })
    }

    pub fn space(n: usize) -> Self {
        HPoly {
            a: RatMat::new(vec![], n),
            b: vec![],
            witness: vec![Rat::zero(); n],
        }
    }

    /// {x : x_n > 0}.
    pub fn halfspace(n: usize) -> Self {
        let mut row = vec![Rat::zero(); n];
        row[n - 1] = -Rat::one();
        let mut w = vec![Rat::zero(); n];
        w[n - 1] = Rat::one();
        HPoly {
            a: RatMat::new(vec![row], n),
            b: vec![Rat::zero()],
            witness: w,
        }
    }

    /// The positive orthant {x : x_i > 0}.
    pub fn orthant(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![Rat::zero(); n];
                r[i] = -Rat::one();
                r
            })
            .collect();
        HPoly {
            a: RatMat::new(rows, n),
            b: vec![Rat::zero(); n],
            witness: vec![Rat::one(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.a.ncols
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &RatMat {
        &self.a
    }

    pub fn b(&self) -> &[Rat] {
        &self.b
    }

    pub fn witness(&self) -> &[Rat] {
        &self.witness
    }

    pub fn witness_f64(&self) -> Vec<f64> {
        vec_to_f64(&self.witness)
    }

    pub fn contains_rat(&self, x: &[Rat]) -> Membership {
        let mut boundary = false;
        for (row, bi) in self.a.rows.iter().zip(&self.b) {
            let v = dot(row, x);
            if &v > bi {
                return Membership::Outside;
            }
            if &v == bi {
                boundary = true;
            }
        }
        if boundary {
            Membership::Boundary
        } else {
            Membership::Interior
        }
    }

    /// max_i (a_i . x - b_i) as f64; negative inside.
    pub fn defect(&self, x: &[f64]) -> f64 {
        self.a
            .rows
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| {
                let v: f64 = row.iter().zip(x).map(|(a, xi)| rat_to_f64(a) * xi).sum();
                v - rat_to_f64(bi)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exit parameter of the ray x + t u out of the closure, with the index of
    /// the first constraint that becomes active; None if the ray stays inside.
    pub fn ray_exit(&self, x: &[Rat], u: &[Rat]) -> Option<(Rat, usize)> {
        let mut best: Option<(Rat, usize)> = None;
        for (i, (row, bi)) in self.a.rows.iter().zip(&self.b).enumerate() {
            let au = dot(row, u);
            if au.is_positive() {
                let t = (bi - dot(row, x)) / au;
                if best.as_ref().map_or(true, |(bt, _)| &t < bt) {
                    best = Some((t, i));
                }
            }
        }
        best
    }

    /// Indices of constraints active at x (exact equality).
    pub fn active_set(&self, x: &[Rat]) -> Vec<usize> {
        self.a
            .rows
            .iter()
            .zip(&self.b)
            .enumerate()
            .filter(|(_, (row, bi))| &dot(row, x) == *bi)
            .map(|(i, _)| i)
            .collect()
    }

    /// Basis of the lineality space {u : Au = 0}.
    pub fn lineality(&self) -> Vec<Vec<Rat>> {
        if self.m() == 0 {
            return RatMat::identity(self.n()).rows;
        }
        self.a.null_space()
    }

    /// Image under the invertible affine map y = L x + t.
    pub fn map_affine(&self, l: &RatMat, t: &[Rat]) -> Result<Self> {
        let linv = l
            .inverse()
            .ok_or_else(|| GeometryError::Invalid("affine map is singular".into()))?;
        let a2 = RatMat::new(
            self.a.rows.iter().map(|r| linv.transpose().mul_vec(r)).collect(),
            self.n(),
        );
        let b2 = self
            .b
            .iter()
            .zip(a2.rows.iter())
            .map(|(bi, r2)| bi + dot(r2, t))
            .collect();
        let witness = l
            .mul_vec(&self.witness)
            .iter()
            .zip(t)
            .map(|(v, ti)| v + ti)
            .collect();
        Ok(HPoly { a: a2, b: b2, witness })
    }

    pub fn product(&self, other: &HPoly) -> HPoly {
        let n = self.n() + other.n();
        let mut rows = Vec::new();
        for r in &self.a.rows {
            let mut row = r.clone();
            row.extend(vec![Rat::zero(); other.n()]);
            rows.push(row);
        }
        for r in &other.a.rows {
            let mut row = vec![Rat::zero(); self.n()];
            row.extend(r.clone());
            rows.push(row);
        }
        let mut b = self.b.clone();
        b.extend(other.b.clone());
        let mut witness = self.witness.clone();
        witness.extend(other.witness.clone());
        HPoly {
            a: RatMat::new(rows, n),
            b,
            witness,
        }
    }

    /// Cone {(x, t) : Ax - tb < 0, t > 0} in one higher dimension.
    pub fn homogenize(&self) -> HPoly {
        let n = self.n();
        let mut rows: Vec<Vec<Rat>> = self
            .a
            .rows
            .iter()
            .zip(&self.b)
            .map(|(r, bi)| {
                let mut row = r.clone();
                row.push(-bi.clone());
                row
            })
            .collect();
        let mut trow = vec![Rat::zero(); n + 1];
        trow[n] = -Rat::one();
        rows.push(trow);
        let mut b = vec![Rat::zero(); self.m()];
        b.push(Rat::zero());
        let mut witness = self.witness.clone();
        witness.push(Rat::one());
        HPoly {
            a: RatMat::new(rows, n + 1),
            b,
            witness,
        }
    }

    /// All vertices of the closure, by brute-force basis enumeration.
    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        let n = self.n();
        let m = self.m();
        let mut out: Vec<Vec<Rat>> = Vec::new();
        if n == 0 || m < n {
            return out;
        }
        for subset in subsets(m, n) {
            let sub = RatMat::new(subset.iter().map(|&i| self.a.rows[i].clone()).collect(), n);
            if sub.rank() < n {
                continue;
            }
            let rhs: Vec<Rat> = subset.iter().map(|&i| self.b[i].clone()).collect();
            let Some(x) = sub.solve(&rhs) else { continue };
            if self.contains_rat(&x) != Membership::Outside && !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }
}

fn interior_point(a: &RatMat, b: &[Rat]) -> Result<Vec<Rat>> {
    let n = a.ncols;
    if a.nrows() == 0 {
        return Ok(vec![Rat::zero(); n]);
    }
    // max t s.t. Ax + t * rowscale <= b, t <= 1.
    let mut rows = Vec::new();
    for r in &a.rows {
        let mut row = r.clone();
        let scale: Rat = r.iter().map(|x| x.abs()).sum();
        row.push(scale);
        rows.push(row);
    }
    let mut cap = vec![Rat::zero(); n];
    cap.push(Rat::one());
    rows.push(cap);
    let mut rhs = b.to_vec();
    rhs.push(Rat::one());
    let mut c = vec![Rat::zero(); n];
    c.push(-Rat::one());
    match solve_lp(&c, &RatMat::new(rows, n + 1), &rhs, &RatMat::new(vec![], n + 1), &[]) {
        LpResult::Optimal { x, value } => {
            if (-value).is_positive() {
                Ok(x[..n].to_vec())
            } else {
                Err(GeometryError::EmptyInterior)
            }
        }
        _ => Err(GeometryError::EmptyInterior),
    }
}

/// Whether the cone {w : Mw <= 0} is just the origin.
pub fn cone_is_trivial(m: &RatMat) -> bool {
    let d = m.ncols;
    if d == 0 {
        return true;
    }
    let mut rows = m.rows.clone();
    for j in 0..d {
        let mut up = vec![Rat::zero(); d];
        up[j] = Rat::one();
        rows.push(up.clone());
        let mut down = up;
        down[j] = -Rat::one();
        rows.push(down);
    }
    let a = RatMat::new(rows, d);
    let b = {
        let mut b = vec![Rat::zero(); m.nrows()];
        b.extend(vec![Rat::one(); 2 * d]);
        b
    };
    for j in 0..d {
        for sign in [1i64, -1] {
            let mut c = vec![Rat::zero(); d];
            c[j] = Rat::from_integer(sign.into());
            match solve_lp(&c, &a, &b, &RatMat::new(vec![], d), &[]) {
                LpResult::Optimal { value, .. } => {
                    if value.is_negative() {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

/// Rows of M that hold with equality on all of {w : Mw <= 0}.
pub fn implicit_equalities(m: &RatMat) -> Vec<usize> {
    let d = m.ncols;
    (0..m.nrows())
        .filter(|&i| {
            // implicit iff min m_i.w over the cone (clipped at -1) is 0
            let mut rows = m.rows.clone();
            let mut clip = m.rows[i].iter().map(|x| -x.clone()).collect::<Vec<_>>();
            rows.push(std::mem::take(&mut clip));
            let mut b = vec![Rat::zero(); m.nrows()];
            b.push(Rat::one());
            let c = m.rows[i].clone();
            match solve_lp(&c, &RatMat::new(rows, d), &b, &RatMat::new(vec![], d), &[]) {
                LpResult::Optimal { value, .. } => !value.is_negative(),
                _ => true,
            }
        })
        .collect()
}

/// Extreme rays of the pointed cone {u : Au <= 0}, by enumerating
/// (n-1)-subsets of active rows.
pub fn extreme_rays(a: &RatMat) -> Vec<Vec<Rat>> {
    let n = a.ncols;
    let m = a.nrows();
    let mut out: Vec<Vec<Rat>> = Vec::new();
    if n == 1 {
        for dir in [Rat::one(), -Rat::one()] {
            let v = vec![dir];
            let inside = a.rows.iter().all(|r| !dot(r, &v).is_positive());
            if inside && !v.iter().all(|x| x.is_zero()) {
                out.push(v);
            }
        }
        return out;
    }
    if m + 1 < n {
        return out;
    }
    for subset in subsets(m, n - 1) {
        let sub = RatMat::new(subset.iter().map(|&i| a.rows[i].clone()).collect(), n);
        let ns = sub.null_space();
        if ns.len() != 1 {
            continue;
        }
        let v = ns.into_iter().next().unwrap();
        for cand in [v.clone(), v.iter().map(|x| -x.clone()).collect::<Vec<_>>()] {
            if a.rows.iter().all(|r| !dot(r, &cand).is_positive()) {
                let norm = normalize_dir(&cand);
                if !out.iter().any(|o| normalize_dir(o) == norm) {
                    out.push(cand);
                }
            }
        }
    }
    out
}

fn normalize_dir(v: &[Rat]) -> Vec<Rat> {
    let lead = v.iter().find(|x| !x.is_zero()).cloned().unwrap_or_else(Rat::one);
    v.iter().map(|x| x / &lead).collect()
}

pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// Facet-inequality hull of a full-dimensional point set, with its vertices.
pub struct Hull {
    pub poly: HPoly,
    pub vertex_indices: Vec<usize>,
}

pub fn convex_hull(points: &[Vec<Rat>]) -> Result<Hull> {
    let n = points.first().map(|p| p.len()).unwrap_or(0);
    if n == 0 || points.len() < n + 1 {
        return Err(GeometryError::DegenerateSpan {
            dim: affine_rank(points),
            expected: n,
        });
    }
    if affine_rank(points) < n {
        return Err(GeometryError::DegenerateSpan {
            dim: affine_rank(points),
            expected: n,
        });
    }
    let mut facets: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for subset in subsets(points.len(), n) {
        // Hyperplane through the n chosen points: normal in the null space of
        // the difference matrix.
        let p0 = &points[subset[0]];
        let diffs: Vec<Vec<Rat>> = subset[1..]
            .iter()
            .map(|&i| points[i].iter().zip(p0).map(|(x, y)| x - y).collect())
            .collect();
        let ns = RatMat::new(diffs, n).null_space();
        if ns.len() != 1 {
            continue;
        }
        let normal = ns.into_iter().next().unwrap();
        let offset = dot(&normal, p0);
        let mut pos = false;
        let mut neg = false;
        for p in points {
            let v = dot(&normal, p);
            if v > offset {
                pos = true;
            } else if v < offset {
                neg = true;
            }
        }
        let (normal, offset) = if pos && neg {
            continue;
        } else if pos {
            (normal.iter().map(|x| -x.clone()).collect::<Vec<_>>(), -offset)
        } else {
            (normal, offset)
        };
        let key = normalize_facet(&normal, &offset);
        if !facets.iter().any(|f| normalize_facet(&f.0, &f.1) == key) {
            facets.push((normal, offset));
        }
    }
    let a = RatMat::new(facets.iter().map(|f| f.0.clone()).collect(), n);
    let b = facets.into_iter().map(|f| f.1).collect();
    let poly = HPoly::new(a, b)?;
    let vertex_indices = points
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let active = poly.active_set(p);
            let sub = RatMat::new(active.iter().map(|&i| poly.a.rows[i].clone()).collect(), n);
            sub.rank() == n
        })
        .map(|(i, _)| i)
        .collect();
    Ok(Hull { poly, vertex_indices })
}

fn normalize_facet(normal: &[Rat], offset: &Rat) -> (Vec<Rat>, Rat) {
    let lead = normal
        .iter()
        .find(|x| !x.is_zero())
        .cloned()
        .unwrap_or_else(Rat::one)
        .abs();
    (
        normal.iter().map(|x| x / &lead).collect(),
        offset / &lead,
    )
}

fn affine_rank(points: &[Vec<Rat>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let p0 = &points[0];
    let diffs: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(x, y)| x - y).collect())
        .collect();
    RatMat::new(diffs, p0.len()).rank()
}
