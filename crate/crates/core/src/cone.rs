//! Closed convex cones with apex at the origin, and recession cones of
//! convex domains.

use crate::domain::hpoly;
use crate::domain::ConvexDomain;
use crate::error::{GeometryError, Result};
use crate::rat::{orthogonal_complement, rat_to_f64, vec_from_f64, vec_to_f64, Rat, RatMat};
use crate::simplex::{solve_lp, LpResult};
use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum ConeRepr {
    /// {u : Au <= 0}, exact.
    Poly { a: RatMat },
    /// Nonnegative span of finitely many rays, exact.
    Rays { rays: Vec<Vec<Rat>>, ambient: usize },
    /// {u : u_1 >= |(u_2, ..., u_n)|}.
    Lorentz { n: usize },
    Product(Vec<Cone>),
    LinearImage {
        linear: DMatrix<f64>,
        inv: DMatrix<f64>,
        base: Box<Cone>,
    },
    /// Closure of the homogenization cone over a domain, with the recession
    /// cone of the base governing the t = 0 slice.
    OverDomain {
        base: Box<ConvexDomain>,
        base_cone: Box<Cone>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    repr: ConeRepr,
    ambient: usize,
    dim: usize,
    pointed: bool,
}

impl Cone {
    pub fn poly(a: RatMat) -> Cone {
        let n = a.ncols;
        let implicit = hpoly::implicit_equalities(&a);
        let eq = RatMat::new(implicit.iter().map(|&i| a.rows[i].clone()).collect(), n);
        let dim = n - eq.rank();
        let pointed = a.null_space().is_empty() && n > 0 || n == 0;
        Cone { repr: ConeRepr::Poly { a }, ambient: n, dim, pointed }
    }

    pub fn rays(rays: Vec<Vec<Rat>>, ambient: usize) -> Cone {
        let dim = RatMat::new(rays.clone(), ambient).rank();
        let pointed = rays_pointed(&rays, ambient);
        Cone { repr: ConeRepr::Rays { rays, ambient }, ambient, dim, pointed }
    }

    pub fn lorentz(n: usize) -> Cone {
        Cone { repr: ConeRepr::Lorentz { n }, ambient: n, dim: n, pointed: true }
    }

    pub fn product(factors: Vec<Cone>) -> Cone {
        let ambient = factors.iter().map(|c| c.ambient).sum();
        let dim = factors.iter().map(|c| c.dim).sum();
        let pointed = factors.iter().all(|c| c.pointed);
        Cone { repr: ConeRepr::Product(factors), ambient, dim, pointed }
    }

    pub fn linear_image(linear: DMatrix<f64>, base: Cone) -> Result<Cone> {
        let inv = linear
            .clone()
            .try_inverse()
            .ok_or_else(|| GeometryError::Invalid("cone image map is singular".into()))?;
        let ambient = base.ambient;
        let dim = base.dim;
        let pointed = base.pointed;
        Ok(Cone {
            repr: ConeRepr::LinearImage { linear, inv, base: Box::new(base) },
            ambient,
            dim,
            pointed,
        })
    }

    fn over_domain(base: ConvexDomain) -> Result<Cone> {
        let base_cone = asymptotic_cone(&base)?;
        let n = base.ambient_dim();
        let pointed = base.lineality_basis().is_empty() && base_cone.pointed;
        Ok(Cone {
            repr: ConeRepr::OverDomain { base: Box::new(base), base_cone: Box::new(base_cone) },
            ambient: n + 1,
            dim: n + 1,
            pointed,
        })
    }

    pub fn repr(&self) -> &ConeRepr {
        &self.repr
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Contains no line.
    pub fn pointed(&self) -> bool {
        self.pointed
    }

    /// Scale-free violation measure: 0 on the cone, positive off it. The
    /// scale is representation-dependent but comparable to Euclidean distance
    /// on the unit sphere.
    pub fn distance(&self, u: &[f64]) -> f64 {
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-14 {
            return 0.0;
        }
        let unit: Vec<f64> = u.iter().map(|v| v / norm).collect();
        self.raw_distance(&unit)
    }

    fn raw_distance(&self, u: &[f64]) -> f64 {
        match &self.repr {
            ConeRepr::Poly { a } => a
                .rows
                .iter()
                .map(|row| {
                    let rf = vec_to_f64(row);
                    let scale = rf.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-30);
                    rf.iter().zip(u).map(|(ai, ui)| ai * ui).sum::<f64>() / scale
                })
                .fold(0.0, f64::max),
            ConeRepr::Rays { rays, ambient } => {
                rays_linf_distance(rays, *ambient, u).unwrap_or(f64::INFINITY)
            }
            ConeRepr::Lorentz { .. } => {
                let rest = u[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                ((rest - u[0]) / std::f64::consts::SQRT_2).max(0.0)
            }
            ConeRepr::Product(factors) => {
                let mut off = 0;
                let mut worst: f64 = 0.0;
                for c in factors {
                    worst = worst.max(c.raw_distance(&u[off..off + c.ambient]));
                    off += c.ambient;
                }
                worst
            }
            ConeRepr::LinearImage { inv, base, .. } => {
                let v = inv * DVector::from_column_slice(u);
                base.distance(v.as_slice())
            }
            ConeRepr::OverDomain { base, base_cone } => {
                let n = base.ambient_dim();
                let (w, s) = (&u[..n], u[n]);
                if s < -1e-12 {
                    -s
                } else if s > 1e-9 {
                    let scaled: Vec<f64> = w.iter().map(|v| v / s).collect();
                    (s * base.defect(&scaled)).max(0.0)
                } else {
                    base_cone.distance(w)
                }
            }
        }
    }

    pub fn contains(&self, u: &[f64], tol: f64) -> bool {
        self.distance(u) <= tol
    }

    pub fn lineality_basis(&self) -> Vec<Vec<f64>> {
        match &self.repr {
            ConeRepr::Poly { a } => a.null_space().iter().map(|v| vec_to_f64(v)).collect(),
            ConeRepr::Rays { .. } | ConeRepr::Lorentz { .. } => vec![],
            ConeRepr::Product(factors) => {
                let mut out = Vec::new();
                let mut off = 0;
                for c in factors {
                    for v in c.lineality_basis() {
                        let mut e = vec![0.0; self.ambient];
                        e[off..off + c.ambient].copy_from_slice(&v);
                        out.push(e);
                    }
                    off += c.ambient;
                }
                out
            }
            ConeRepr::LinearImage { linear, base, .. } => base
                .lineality_basis()
                .iter()
                .map(|v| (linear * DVector::from_column_slice(v)).iter().copied().collect())
                .collect(),
            ConeRepr::OverDomain { base, .. } => base
                .lineality_basis()
                .into_iter()
                .map(|mut v| {
                    v.push(0.0);
                    v
                })
                .collect(),
        }
    }

    /// Basis of the linear span of the cone.
    pub fn span_basis(&self) -> Vec<Vec<f64>> {
        match &self.repr {
            ConeRepr::LinearImage { linear, base, .. } => base
                .span_basis()
                .iter()
                .map(|v| (linear * DVector::from_column_slice(v)).iter().copied().collect())
                .collect(),
            ConeRepr::Product(factors) => {
                let mut out = Vec::new();
                let mut off = 0;
                for c in factors {
                    for v in c.span_basis() {
                        let mut e = vec![0.0; self.ambient];
                        e[off..off + c.ambient].copy_from_slice(&v);
                        out.push(e);
                    }
                    off += c.ambient;
                }
                out
            }
            _ => self
                .span_basis_rat()
                .expect("non-image cones have exact spans")
                .iter()
                .map(|v| vec_to_f64(v))
                .collect(),
        }
    }

    /// Exact span basis when every layer is exact.
    pub fn span_basis_rat(&self) -> Option<Vec<Vec<Rat>>> {
        match &self.repr {
            ConeRepr::Poly { a } => {
                let implicit = hpoly::implicit_equalities(a);
                let eq = RatMat::new(
                    implicit.iter().map(|&i| a.rows[i].clone()).collect(),
                    a.ncols,
                );
                Some(if eq.nrows() == 0 {
                    RatMat::identity(a.ncols).rows
                } else {
                    eq.null_space()
                })
            }
            ConeRepr::Rays { rays, ambient } => Some(independent_subset(rays, *ambient)),
            ConeRepr::Lorentz { n } => Some(RatMat::identity(*n).rows),
            ConeRepr::Product(factors) => {
                let mut out = Vec::new();
                let mut off = 0;
                for c in factors {
                    for v in c.span_basis_rat()? {
                        let mut e = vec![Rat::zero(); self.ambient];
                        e[off..off + c.ambient].clone_from_slice(&v);
                        out.push(e);
                    }
                    off += c.ambient;
                }
                Some(out)
            }
            ConeRepr::OverDomain { .. } => Some(RatMat::identity(self.ambient).rows),
            ConeRepr::LinearImage { .. } => None,
        }
    }

    /// Extreme rays, when the cone has finitely many (pointed polyhedral-like
    /// representations); None otherwise.
    pub fn extreme_rays(&self) -> Option<Vec<Vec<f64>>> {
        match &self.repr {
            ConeRepr::Poly { a } => {
                if !self.pointed {
                    return None;
                }
                Some(
                    hpoly::extreme_rays(a)
                        .iter()
                        .map(|v| normalize(&vec_to_f64(v)))
                        .collect(),
                )
            }
            ConeRepr::Rays { rays, ambient } => Some(
                minimal_generators(rays, *ambient)
                    .iter()
                    .map(|v| normalize(&vec_to_f64(v)))
                    .collect(),
            ),
            ConeRepr::Lorentz { .. } => None,
            ConeRepr::Product(factors) => {
                if !self.pointed {
                    return None;
                }
                let mut out = Vec::new();
                let mut off = 0;
                for c in factors {
                    let rays = c.extreme_rays()?;
                    for r in rays {
                        let mut e = vec![0.0; self.ambient];
                        e[off..off + c.ambient].copy_from_slice(&r);
                        out.push(e);
                    }
                    off += c.ambient;
                }
                Some(out)
            }
            ConeRepr::LinearImage { linear, base, .. } => Some(
                base.extreme_rays()?
                    .iter()
                    .map(|v| {
                        normalize(
                            (linear * DVector::from_column_slice(v)).as_slice(),
                        )
                    })
                    .collect(),
            ),
            ConeRepr::OverDomain { .. } => None,
        }
    }

    /// A direction in the relative interior (zero vector for the cone {0}
    /// and for pure subspaces).
    pub fn interior_direction(&self) -> Vec<f64> {
        match &self.repr {
            ConeRepr::Poly { a } => {
                let lin = a.null_space();
                let w = orthogonal_complement(&lin, a.ncols);
                if w.is_empty() {
                    return vec![0.0; a.ncols];
                }
                let reduced = RatMat::new(
                    a.rows
                        .iter()
                        .map(|row| w.iter().map(|v| crate::rat::dot(row, v)).collect())
                        .collect(),
                    w.len(),
                );
                let rays = hpoly::extreme_rays(&reduced);
                let mut out = vec![0.0; a.ncols];
                for r in rays {
                    let lifted: Vec<f64> = (0..a.ncols)
                        .map(|i| {
                            w.iter()
                                .zip(&r)
                                .map(|(wv, ri)| rat_to_f64(&wv[i]) * rat_to_f64(ri))
                                .sum()
                        })
                        .collect();
                    let u = normalize(&lifted);
                    for (o, v) in out.iter_mut().zip(&u) {
                        *o += v;
                    }
                }
                out
            }
            ConeRepr::Rays { rays, ambient } => {
                let mut out = vec![0.0; *ambient];
                for r in rays {
                    let u = normalize(&vec_to_f64(r));
                    for (o, v) in out.iter_mut().zip(&u) {
                        *o += v;
                    }
                }
                out
            }
            ConeRepr::Lorentz { n } => {
                let mut v = vec![0.0; *n];
                v[0] = 1.0;
                v
            }
            ConeRepr::Product(factors) => {
                factors.iter().flat_map(|c| c.interior_direction()).collect()
            }
            ConeRepr::LinearImage { linear, base, .. } => {
                (linear * DVector::from_column_slice(&base.interior_direction()))
                    .iter()
                    .copied()
                    .collect()
            }
            ConeRepr::OverDomain { base, .. } => {
                let mut v = base.witness();
                v.push(1.0);
                v
            }
        }
    }

    /// A random element of the cone with magnitude up to `scale`.
    pub fn sample_element<R: Rng>(&self, rng: &mut R, scale: f64) -> Vec<f64> {
        match &self.repr {
            ConeRepr::Poly { a } => {
                let lin = a.null_space();
                let w = orthogonal_complement(&lin, a.ncols);
                let mut out = vec![0.0; a.ncols];
                if !w.is_empty() {
                    let reduced = RatMat::new(
                        a.rows
                            .iter()
                            .map(|row| w.iter().map(|v| crate::rat::dot(row, v)).collect())
                            .collect(),
                        w.len(),
                    );
                    for r in hpoly::extreme_rays(&reduced) {
                        let c: f64 = rng.gen_range(0.0..scale);
                        for i in 0..a.ncols {
                            let li: f64 = w
                                .iter()
                                .zip(&r)
                                .map(|(wv, ri)| rat_to_f64(&wv[i]) * rat_to_f64(ri))
                                .sum();
                            out[i] += c * li;
                        }
                    }
                }
                for v in &lin {
                    let c: f64 = rng.gen_range(-scale..scale);
                    for i in 0..a.ncols {
                        out[i] += c * rat_to_f64(&v[i]);
                    }
                }
                out
            }
            ConeRepr::Rays { rays, ambient } => {
                let mut out = vec![0.0; *ambient];
                for r in rays {
                    let c: f64 = rng.gen_range(0.0..scale);
                    for (o, v) in out.iter_mut().zip(r) {
                        *o += c * rat_to_f64(v);
                    }
                }
                out
            }
            ConeRepr::Lorentz { n } => {
                let h: f64 = rng.gen_range(0.0..scale);
                let r: f64 = rng.gen_range(0.0..1.0);
                let mut dir: Vec<f64> = (0..*n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let dn = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
                for v in dir.iter_mut() {
                    *v *= h * r / dn;
                }
                let mut out = vec![h];
                out.extend(dir);
                out
            }
            ConeRepr::Product(factors) => factors
                .iter()
                .flat_map(|c| c.sample_element(rng, scale))
                .collect(),
            ConeRepr::LinearImage { linear, base, .. } => {
                (linear * DVector::from_column_slice(&base.sample_element(rng, scale)))
                    .iter()
                    .copied()
                    .collect()
            }
            ConeRepr::OverDomain { base, .. } => {
                let w = base.witness();
                let t: f64 = rng.gen_range(0.0..scale);
                let mut out: Vec<f64> = w.iter().map(|v| v * t).collect();
                out.push(t);
                out
            }
        }
    }
}

/// The recession cone AC(D) = {u : x + t u stays inside for all t >= 0}.
pub fn asymptotic_cone(d: &ConvexDomain) -> Result<Cone> {
    match d {
        ConvexDomain::HPoly(h) => Ok(Cone::poly(h.a().clone())),
        ConvexDomain::Paraboloid { n } => {
            let mut ray = vec![Rat::zero(); *n];
            ray[*n - 1] = Rat::one();
            Ok(Cone::rays(vec![ray], *n))
        }
        ConvexDomain::Ball { n } => Ok(Cone::rays(vec![], *n)),
        ConvexDomain::Lorentz { n } => Ok(Cone::lorentz(*n)),
        ConvexDomain::Hyperbola => {
            let a = RatMat::new(
                vec![vec![-Rat::one(), Rat::zero()], vec![Rat::zero(), -Rat::one()]],
                2,
            );
            Ok(Cone::poly(a))
        }
        ConvexDomain::Product { factors } => Ok(Cone::product(
            factors
                .iter()
                .map(asymptotic_cone)
                .collect::<Result<Vec<_>>>()?,
        )),
        ConvexDomain::AffineImage { map, base, .. } => {
            Cone::linear_image(map.linear.clone(), asymptotic_cone(base)?)
        }
        ConvexDomain::Homogenized { base } => Cone::over_domain((**base).clone()),
        ConvexDomain::Join(j) => {
            let (d1, d2) = j.factors();
            if d1.is_bounded() && d2.is_bounded() {
                Ok(Cone::rays(vec![], j.ambient_dim()))
            } else {
                Err(GeometryError::Unsupported(
                    "recession cone of an unbounded join".into(),
                ))
            }
        }
    }
}

fn rays_pointed(rays: &[Vec<Rat>], ambient: usize) -> bool {
    if rays.is_empty() {
        return true;
    }
    // A line exists iff 0 is a nontrivial nonnegative combination of rays.
    let m = rays.len();
    let mut a_eq_rows: Vec<Vec<Rat>> = (0..ambient)
        .map(|i| rays.iter().map(|r| r[i].clone()).collect())
        .collect();
    a_eq_rows.push(vec![Rat::one(); m]);
    let mut b_eq = vec![Rat::zero(); ambient];
    b_eq.push(Rat::one());
    let a_ub = RatMat::new(
        (0..m)
            .map(|j| {
                let mut row = vec![Rat::zero(); m];
                row[j] = -Rat::one();
                row
            })
            .collect(),
        m,
    );
    let b_ub = vec![Rat::zero(); m];
    let c = vec![Rat::zero(); m];
    matches!(
        solve_lp(&c, &a_ub, &b_ub, &RatMat::new(a_eq_rows, m), &b_eq),
        LpResult::Infeasible
    )
}

fn rays_linf_distance(rays: &[Vec<Rat>], ambient: usize, u: &[f64]) -> Option<f64> {
    let ur = vec_from_f64(u)?;
    if rays.is_empty() {
        let d = u.iter().map(|v| v.abs()).fold(0.0, f64::max);
        return Some(d);
    }
    // min t s.t. -t <= u_j - sum_i lambda_i r_ij <= t, lambda >= 0
    let m = rays.len();
    let nv = m + 1;
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for j in 0..ambient {
        let mut up = vec![Rat::zero(); nv];
        let mut down = vec![Rat::zero(); nv];
        for (i, r) in rays.iter().enumerate() {
            up[i] = -r[j].clone();
            down[i] = r[j].clone();
        }
        up[m] = -Rat::one();
        down[m] = -Rat::one();
        b.push(-ur[j].clone());
        rows.push(up);
        b.push(ur[j].clone());
        rows.push(down);
    }
    for i in 0..m {
        let mut row = vec![Rat::zero(); nv];
        row[i] = -Rat::one();
        rows.push(row);
        b.push(Rat::zero());
    }
    let mut c = vec![Rat::zero(); nv];
    c[m] = Rat::one();
    match solve_lp(&c, &RatMat::new(rows, nv), &b, &RatMat::new(vec![], nv), &[]) {
        LpResult::Optimal { value, .. } => Some(rat_to_f64(&value).max(0.0)),
        _ => None,
    }
}

fn independent_subset(rays: &[Vec<Rat>], ambient: usize) -> Vec<Vec<Rat>> {
    let mut out: Vec<Vec<Rat>> = Vec::new();
    for r in rays {
        let mut cand = out.clone();
        cand.push(r.clone());
        if RatMat::new(cand.clone(), ambient).rank() == cand.len() {
            out = cand;
        }
    }
    out
}

fn minimal_generators(rays: &[Vec<Rat>], ambient: usize) -> Vec<Vec<Rat>> {
    let mut out = Vec::new();
    for (i, r) in rays.iter().enumerate() {
        let others: Vec<Vec<Rat>> = rays
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, o)| o.clone())
            .collect();
        if others.is_empty() {
            out.push(r.clone());
            continue;
        }
        let rf = vec_to_f64(r);
        match rays_linf_distance(&others, ambient, &rf) {
            Some(d) if d <= 1e-12 => {}
            _ => out.push(r.clone()),
        }
    }
    out
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n < 1e-14 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / n).collect()
    }
}
