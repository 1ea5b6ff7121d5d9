//! Convex domain representations with a uniform query interface.
//!
//! Polyhedral domains are kept in exact rational form; quadric domains use
//! closed forms; composite and affine-image domains fall back to bisection
//! for ray queries. Membership elsewhere uses a float tolerance band of 1e-9.

pub mod face;
pub mod hpoly;
pub mod join;
pub mod json;
pub mod osculating;

use crate::affine::AffineMap;
use crate::error::{GeometryError, Result};
use crate::projective::ProjectivePoint;
use crate::rat::{vec_from_f64, vec_to_f64, Rat, RatMat};
use nalgebra::DVector;
use num_traits::Zero;

pub use hpoly::{convex_hull, HPoly, Hull};
pub use join::{convex_sum, Join, Placement};

/// Default membership tolerance band.
pub const EPS: f64 = 1e-9;

/// Ray parameter beyond which a ray is reported as staying inside.
const T_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RayHit {
    Finite { t: f64, point: Vec<f64> },
    /// The ray stays inside; the hit is the point at infinity of its direction.
    Infinite { point: ProjectivePoint },
}

impl RayHit {
    pub fn is_finite(&self) -> bool {
        matches!(self, RayHit::Finite { .. })
    }

    pub fn t(&self) -> f64 {
        match self {
            RayHit::Finite { t, .. } => *t,
            RayHit::Infinite { .. } => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Convexity {
    pub properly_convex: bool,
    pub strictly_convex: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexDomain {
    /// {x : Ax < b}, exact rationals.
    HPoly(HPoly),
    /// {x : x_n > x_1^2 + ... + x_{n-1}^2}.
    Paraboloid { n: usize },
    /// {x : |x| < 1}.
    Ball { n: usize },
    /// {x : x_1 > sqrt(x_2^2 + ... + x_n^2)}, n >= 3.
    Lorentz { n: usize },
    /// {(x, y) : x > 0, xy > 1}.
    Hyperbola,
    Product { factors: Vec<ConvexDomain> },
    /// Image of a non-polyhedral base under an invertible affine map.
    AffineImage {
        map: AffineMap,
        inv: AffineMap,
        base: Box<ConvexDomain>,
    },
    /// Cone {(x, t) : t > 0, x/t in base} over a non-polyhedral base.
    Homogenized { base: Box<ConvexDomain> },
    /// Projective join of two placed factors.
    Join(Join),
}

impl ConvexDomain {
    pub fn hpoly(a: RatMat, b: Vec<Rat>) -> Result<Self> {
        Ok(ConvexDomain::HPoly(HPoly::new(a, b)?))
    }

    pub fn hpoly_f64(a: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        let am = RatMat::from_f64(a)
            .ok_or_else(|| GeometryError::Invalid("non-finite constraint entry".into()))?;
        let bv = vec_from_f64(b)
            .ok_or_else(|| GeometryError::Invalid("non-finite constraint entry".into()))?;
        Self::hpoly(am, bv)
    }

    pub fn space(n: usize) -> Self {
        ConvexDomain::HPoly(HPoly::space(n))
    }

    pub fn halfspace(n: usize) -> Self {
        ConvexDomain::HPoly(HPoly::halfspace(n))
    }

    pub fn orthant(n: usize) -> Self {
        ConvexDomain::HPoly(HPoly::orthant(n))
    }

    pub fn paraboloid(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(GeometryError::Invalid("paraboloid needs dimension >= 2".into()));
        }
        Ok(ConvexDomain::Paraboloid { n })
    }

    pub fn ball(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(GeometryError::Invalid("ball needs dimension >= 1".into()));
        }
        Ok(ConvexDomain::Ball { n })
    }

    pub fn lorentz(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(GeometryError::Invalid(
                "lorentz cone needs dimension >= 3 (lower dimensions are polyhedral)".into(),
            ));
        }
        Ok(ConvexDomain::Lorentz { n })
    }

    pub fn hyperbola() -> Self {
        ConvexDomain::Hyperbola
    }

    /// Product of factors; flattens nested products and merges an
    /// all-polyhedral list into a single exact polyhedron.
    pub fn product(factors: Vec<ConvexDomain>) -> Result<Self> {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                ConvexDomain::Product { factors } => flat.extend(factors),
                other => flat.push(other),
            }
        }
        if flat.is_empty() {
            return Err(GeometryError::Invalid("empty product".into()));
        }
        if flat.len() == 1 {
            return Ok(flat.into_iter().next().unwrap());
        }
        if flat.iter().all(|f| matches!(f, ConvexDomain::HPoly(_))) {
            let mut it = flat.into_iter();
            let ConvexDomain::HPoly(mut acc) = it.next().unwrap() else { unreachable!() };
            for f in it {
                let ConvexDomain::HPoly(h) = f else { unreachable!() };
                acc = acc.product(&h);
            }
            return Ok(ConvexDomain::HPoly(acc));
        }
        Ok(ConvexDomain::Product { factors: flat })
    }

    /// Image under an invertible affine map. Polyhedral bases are transformed
    /// exactly (map entries are dyadic rationals); affine images compose.
    pub fn affine_image(map: AffineMap, base: ConvexDomain) -> Result<Self> {
        if map.dim() != base.ambient_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: base.ambient_dim(),
                got: map.dim(),
            });
        }
        if !map.is_invertible() {
            return Err(GeometryError::Invalid("affine map is singular".into()));
        }
        match base {
            ConvexDomain::HPoly(h) => {
                let l = RatMat::from_f64(
                    &map.linear
                        .row_iter()
                        .map(|r| r.iter().copied().collect())
                        .collect::<Vec<Vec<f64>>>(),
                )
                .ok_or_else(|| GeometryError::Invalid("non-finite map entry".into()))?;
                let t = vec_from_f64(map.translation.as_slice())
                    .ok_or_else(|| GeometryError::Invalid("non-finite map entry".into()))?;
                Ok(ConvexDomain::HPoly(h.map_affine(&l, &t)?))
            }
            ConvexDomain::AffineImage { map: inner, base, .. } => {
                let composed = map.compose(&inner);
                let inv = composed.inverse()?;
                Ok(ConvexDomain::AffineImage {
                    map: composed,
                    inv,
                    base,
                })
            }
            other => {
                let inv = map.inverse()?;
                Ok(ConvexDomain::AffineImage {
                    map,
                    inv,
                    base: Box::new(other),
                })
            }
        }
    }

    /// The cone {(x, t) : t > 0, x/t inside} one dimension up.
    pub fn homogenize(&self) -> ConvexDomain {
        match self {
            ConvexDomain::HPoly(h) => ConvexDomain::HPoly(h.homogenize()),
            other => ConvexDomain::Homogenized {
                base: Box::new(other.clone()),
            },
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            ConvexDomain::HPoly(h) => h.n(),
            ConvexDomain::Paraboloid { n }
            | ConvexDomain::Ball { n }
            | ConvexDomain::Lorentz { n } => *n,
            ConvexDomain::Hyperbola => 2,
            ConvexDomain::Product { factors } => factors.iter().map(|f| f.ambient_dim()).sum(),
            ConvexDomain::AffineImage { map, .. } => map.dim(),
            ConvexDomain::Homogenized { base } => base.ambient_dim() + 1,
            ConvexDomain::Join(j) => j.ambient_dim(),
        }
    }

    pub fn as_hpoly(&self) -> Option<&HPoly> {
        match self {
            ConvexDomain::HPoly(h) => Some(h),
            _ => None,
        }
    }

    /// A stored interior point.
    pub fn witness(&self) -> Vec<f64> {
        match self {
            ConvexDomain::HPoly(h) => h.witness_f64(),
            ConvexDomain::Paraboloid { n } => {
                let mut w = vec![0.0; *n];
                w[*n - 1] = 1.0;
                w
            }
            ConvexDomain::Ball { n } => vec![0.0; *n],
            ConvexDomain::Lorentz { n } => {
                let mut w = vec![0.0; *n];
                w[0] = 1.0;
                w
            }
            ConvexDomain::Hyperbola => vec![2.0, 2.0],
            ConvexDomain::Product { factors } => {
                factors.iter().flat_map(|f| f.witness()).collect()
            }
            ConvexDomain::AffineImage { map, base, .. } => map.apply_slice(&base.witness()),
            ConvexDomain::Homogenized { base } => {
                let mut w = base.witness();
                w.push(1.0);
                w
            }
            ConvexDomain::Join(j) => j.witness(),
        }
    }

    /// Signed violation: negative inside, ~0 on the boundary, positive outside.
    /// The scale is representation-dependent; only the sign and the 1e-9 band
    /// are meaningful.
    pub fn defect(&self, x: &[f64]) -> f64 {
        match self {
            ConvexDomain::HPoly(h) => h.defect(x),
            ConvexDomain::Paraboloid { n } => {
                let sq: f64 = x[..*n - 1].iter().map(|v| v * v).sum();
                sq - x[*n - 1]
            }
            ConvexDomain::Ball { .. } => x.iter().map(|v| v * v).sum::<f64>() - 1.0,
            ConvexDomain::Lorentz { .. } => {
                let rest: f64 = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                rest - x[0]
            }
            ConvexDomain::Hyperbola => (-x[0]).max(1.0 - x[0] * x[1]),
            ConvexDomain::Product { factors } => {
                let mut off = 0;
                let mut worst = f64::NEG_INFINITY;
                for f in factors {
                    let d = f.ambient_dim();
                    worst = worst.max(f.defect(&x[off..off + d]));
                    off += d;
                }
                worst
            }
            ConvexDomain::AffineImage { inv, base, .. } => base.defect(&inv.apply_slice(x)),
            ConvexDomain::Homogenized { base } => {
                let n = base.ambient_dim();
                let t = x[n];
                if t <= 0.0 {
                    return (-t).max(EPS);
                }
                let scaled: Vec<f64> = x[..n].iter().map(|v| v / t).collect();
                // Multiplying by t keeps the sign and tames the blow-up near t=0.
                (-t).max(t * base.defect(&scaled))
            }
            ConvexDomain::Join(j) => j.defect(x),
        }
    }

    /// Membership with the boundary band scaled to the magnitude of x, so
    /// classification stays meaningful far from the origin.
    pub fn contains(&self, x: &[f64]) -> Result<Membership> {
        let scale = x.iter().map(|v| v.abs()).fold(1.0, f64::max);
        self.contains_eps(x, EPS * scale)
    }

    pub fn contains_eps(&self, x: &[f64], eps: f64) -> Result<Membership> {
        if x.len() != self.ambient_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.ambient_dim(),
                got: x.len(),
            });
        }
        let d = self.defect(x);
        Ok(if d < -eps {
            Membership::Interior
        } else if d <= eps {
            Membership::Boundary
        } else {
            Membership::Outside
        })
    }

    /// Exit of the ray x + t u from an interior point x: the supremum of
    /// interior parameters and the boundary point (or the infinity point of u).
    pub fn boundary_hit(&self, x: &[f64], u: &[f64]) -> Result<RayHit> {
        let n = self.ambient_dim();
        if x.len() != n || u.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: x.len().max(u.len()) });
        }
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-14 {
            return Err(GeometryError::Invalid("zero direction".into()));
        }
        if self.contains(x)? != Membership::Interior {
            return Err(GeometryError::NotInterior);
        }
        self.hit_inner(x, u)
    }

    fn hit_inner(&self, x: &[f64], u: &[f64]) -> Result<RayHit> {
        match self {
            ConvexDomain::HPoly(h) => {
                let xr = vec_from_f64(x)
                    .ok_or_else(|| GeometryError::Invalid("non-finite point".into()))?;
                let ur = vec_from_f64(u)
                    .ok_or_else(|| GeometryError::Invalid("non-finite direction".into()))?;
                match h.ray_exit(&xr, &ur) {
                    None => Ok(infinite_hit(u)),
                    Some((t, _)) => {
                        let point: Vec<Rat> = xr
                            .iter()
                            .zip(&ur)
                            .map(|(xi, ui)| xi + &t * ui)
                            .collect();
                        Ok(RayHit::Finite {
                            t: crate::rat::rat_to_f64(&t),
                            point: vec_to_f64(&point),
                        })
                    }
                }
            }
            ConvexDomain::Paraboloid { n } => {
                let m = *n - 1;
                let a: f64 = u[..m].iter().map(|v| v * v).sum();
                let b: f64 = 2.0 * x[..m].iter().zip(&u[..m]).map(|(xi, ui)| xi * ui).sum::<f64>()
                    - u[m];
                let c: f64 = x[..m].iter().map(|v| v * v).sum::<f64>() - x[m];
                quadratic_hit(self, x, u, a, b, c)
            }
            ConvexDomain::Ball { .. } => {
                let a: f64 = u.iter().map(|v| v * v).sum();
                let b: f64 = 2.0 * x.iter().zip(u).map(|(xi, ui)| xi * ui).sum::<f64>();
                let c: f64 = x.iter().map(|v| v * v).sum::<f64>() - 1.0;
                quadratic_hit(self, x, u, a, b, c)
            }
            ConvexDomain::Lorentz { .. } => {
                let rest = u[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                if rest < u[0] - 1e-12 {
                    return Ok(infinite_hit(u));
                }
                bisect_hit(self, x, u)
            }
            ConvexDomain::Hyperbola => {
                if u[0] > 1e-12 && u[1] > 1e-12 {
                    return Ok(infinite_hit(u));
                }
                bisect_hit(self, x, u)
            }
            ConvexDomain::Product { factors } => {
                let mut best: Option<f64> = None;
                let mut off = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    let (xs, us) = (&x[off..off + d], &u[off..off + d]);
                    off += d;
                    if us.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-14 {
                        continue;
                    }
                    if let RayHit::Finite { t, .. } = f.hit_inner(xs, us)? {
                        if best.map_or(true, |b| t < b) {
                            best = Some(t);
                        }
                    }
                }
                match best {
                    None => Ok(infinite_hit(u)),
                    Some(t) => Ok(RayHit::Finite {
                        t,
                        point: x.iter().zip(u).map(|(xi, ui)| xi + t * ui).collect(),
                    }),
                }
            }
            ConvexDomain::AffineImage { map, inv, base } => {
                let bx = inv.apply_slice(x);
                let bu: Vec<f64> = {
                    let v = &inv.linear * DVector::from_column_slice(u);
                    v.iter().copied().collect()
                };
                match base.hit_inner(&bx, &bu)? {
                    RayHit::Infinite { .. } => Ok(infinite_hit(u)),
                    RayHit::Finite { t, point } => Ok(RayHit::Finite {
                        t,
                        point: map.apply_slice(&point),
                    }),
                }
            }
            ConvexDomain::Homogenized { base } => {
                let n = base.ambient_dim();
                let (w, s) = (&u[..n], u[n]);
                if s > 1e-12 {
                    let scaled: Vec<f64> = w.iter().map(|v| v / s).collect();
                    if base.contains(&scaled)? != Membership::Outside {
                        return Ok(infinite_hit(u));
                    }
                }
                bisect_hit(self, x, u)
            }
            ConvexDomain::Join(_) => bisect_hit(self, x, u),
        }
    }

    /// Basis of the maximal V with D + V = D.
    pub fn lineality_basis(&self) -> Vec<Vec<f64>> {
        match self {
            ConvexDomain::HPoly(h) => h.lineality().iter().map(|v| vec_to_f64(v)).collect(),
            ConvexDomain::Paraboloid { .. }
            | ConvexDomain::Ball { .. }
            | ConvexDomain::Lorentz { .. }
            | ConvexDomain::Hyperbola => vec![],
            ConvexDomain::Product { factors } => {
                let n = self.ambient_dim();
                let mut out = Vec::new();
                let mut off = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    for v in f.lineality_basis() {
                        let mut e = vec![0.0; n];
                        e[off..off + d].copy_from_slice(&v);
                        out.push(e);
                    }
                    off += d;
                }
                out
            }
            ConvexDomain::AffineImage { map, base, .. } => base
                .lineality_basis()
                .iter()
                .map(|v| {
                    let w = &map.linear * DVector::from_column_slice(v);
                    w.iter().copied().collect()
                })
                .collect(),
            ConvexDomain::Homogenized { base } => base
                .lineality_basis()
                .into_iter()
                .map(|mut v| {
                    v.push(0.0);
                    v
                })
                .collect(),
            ConvexDomain::Join(_) => vec![],
        }
    }

    /// Exact lineality basis when available (polyhedral and composite-of-exact).
    pub fn lineality_basis_rat(&self) -> Option<Vec<Vec<Rat>>> {
        match self {
            ConvexDomain::HPoly(h) => Some(h.lineality()),
            ConvexDomain::Paraboloid { .. }
            | ConvexDomain::Ball { .. }
            | ConvexDomain::Lorentz { .. }
            | ConvexDomain::Hyperbola => Some(vec![]),
            ConvexDomain::Product { factors } => {
                let n = self.ambient_dim();
                let mut out = Vec::new();
                let mut off = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    for v in f.lineality_basis_rat()? {
                        let mut e = vec![Rat::zero(); n];
                        e[off..off + d].clone_from_slice(&v);
                        out.push(e);
                    }
                    off += d;
                }
                Some(out)
            }
            ConvexDomain::Homogenized { base } => Some(
                base.lineality_basis_rat()?
                    .into_iter()
                    .map(|mut v| {
                        v.push(Rat::zero());
                        v
                    })
                    .collect(),
            ),
            ConvexDomain::AffineImage { .. } | ConvexDomain::Join(_) => None,
        }
    }

    /// Whether the boundary is nonempty.
    pub fn has_boundary(&self) -> bool {
        match self {
            ConvexDomain::HPoly(h) => h.m() > 0,
            ConvexDomain::Paraboloid { .. }
            | ConvexDomain::Ball { .. }
            | ConvexDomain::Lorentz { .. }
            | ConvexDomain::Hyperbola => true,
            ConvexDomain::Product { factors } => factors.iter().any(|f| f.has_boundary()),
            ConvexDomain::AffineImage { base, .. } => base.has_boundary(),
            ConvexDomain::Homogenized { .. } => true,
            ConvexDomain::Join(_) => true,
        }
    }

    /// Representation-level strict convexity of the affine boundary.
    fn strictly_convex_repr(&self) -> bool {
        match self {
            ConvexDomain::HPoly(h) => h.n() <= 1 || h.m() == 0,
            ConvexDomain::Paraboloid { .. } | ConvexDomain::Ball { .. } => true,
            // Affine convention: the two boundary branches carry no segments.
            ConvexDomain::Hyperbola => true,
            ConvexDomain::Lorentz { .. } => false,
            ConvexDomain::Product { factors } => {
                let with_boundary: Vec<&ConvexDomain> =
                    factors.iter().filter(|f| f.has_boundary()).collect();
                match with_boundary.len() {
                    0 => true,
                    1 => {
                        let free_dims: usize = factors
                            .iter()
                            .filter(|f| !f.has_boundary())
                            .map(|f| f.ambient_dim())
                            .sum();
                        free_dims == 0 && with_boundary[0].strictly_convex_repr()
                    }
                    _ => false,
                }
            }
            ConvexDomain::AffineImage { base, .. } => base.strictly_convex_repr(),
            ConvexDomain::Homogenized { base } => base.ambient_dim() == 0,
            ConvexDomain::Join(j) => j.intrinsic_dim() <= 1,
        }
    }

    /// Proper convexity (no full line in the closure) and strict convexity
    /// (no segment in the affine boundary).
    pub fn classify_convexity(&self) -> Result<Convexity> {
        let properly = self.lineality_basis().is_empty()
            && crate::cone::asymptotic_cone(self)?.pointed();
        Ok(Convexity {
            properly_convex: properly,
            strictly_convex: self.strictly_convex_repr(),
        })
    }
}

fn infinite_hit(u: &[f64]) -> RayHit {
    RayHit::Infinite {
        point: ProjectivePoint::at_infinity(u).expect("nonzero direction"),
    }
}

/// Positive root of a t^2 + b t + c with c < 0 (x interior), for quadric
/// defects that are quadratics along the line.
fn quadratic_hit(d: &ConvexDomain, x: &[f64], u: &[f64], a: f64, b: f64, c: f64) -> Result<RayHit> {
    let t = if a.abs() < 1e-14 {
        if b <= 1e-14 {
            return Ok(infinite_hit(u));
        }
        -c / b
    } else {
        let disc = b * b - 4.0 * a * c;
        if a > 0.0 {
            (-b + disc.sqrt()) / (2.0 * a)
        } else {
            // a < 0 with c < 0: inside for all t >= 0 unless a sign change occurs.
            if disc <= 0.0 || b <= 0.0 {
                return Ok(infinite_hit(u));
            }
            (-b + disc.sqrt()) / (2.0 * a)
        }
    };
    if !t.is_finite() || t <= 0.0 {
        return Ok(infinite_hit(u));
    }
    let _ = d;
    Ok(RayHit::Finite {
        t,
        point: x.iter().zip(u).map(|(xi, ui)| xi + t * ui).collect(),
    })
}

/// Doubling search plus bisection on membership; the interior set along the
/// ray is an interval, so one sign change suffices.
fn bisect_hit(d: &ConvexDomain, x: &[f64], u: &[f64]) -> Result<RayHit> {
    let at = |t: f64| -> Vec<f64> { x.iter().zip(u).map(|(xi, ui)| xi + t * ui).collect() };
    let outside = |t: f64| -> Result<bool> { Ok(d.contains_eps(&at(t), 0.0)? == Membership::Outside) };
    let mut hi = 1.0;
    let mut lo = 0.0;
    while !outside(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > T_CAP {
            return Ok(infinite_hit(u));
        }
    }
    // refine to machine precision so the hit stays in the boundary band
    // even for chords exiting at large coordinates
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if outside(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RayHit::Finite { t: lo, point: at(lo) })
}
