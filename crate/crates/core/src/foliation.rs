//! Foliation of a domain by translates of its asymptotic cone: the base map
//! s(x), the exponential flow along leaves, and sampling-based verification.

use crate::cone::{asymptotic_cone, Cone, ConeRepr};
use crate::domain::{ConvexDomain, HPoly, Membership};
use crate::error::{GeometryError, Result};
use crate::projective::ProjectivePoint;
use crate::rat::{dot, vec_from_f64, vec_to_f64, Rat, RatMat};
use crate::sample;
use num_traits::Zero;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct FoliationChart {
    domain: ConvexDomain,
    cone: Cone,
    span_basis: Vec<Vec<f64>>,
}

impl FoliationChart {
    pub fn new(domain: ConvexDomain) -> Result<FoliationChart> {
        let cone = asymptotic_cone(&domain)?;
        if cone.dim() == 0 {
            return Err(GeometryError::FoliationViolated(
                "asymptotic cone is trivial".into(),
            ));
        }
        let span_basis = cone.span_basis();
        Ok(FoliationChart { domain, cone, span_basis })
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn span_basis(&self) -> &[Vec<f64>] {
        &self.span_basis
    }

    /// The apex s(x) of the leaf through x: the boundary point with
    /// leaf = s(x) + AC. Unique modulo cone lineality; the lineality offset
    /// is fixed to zero relative to x.
    pub fn base_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.domain.contains(x)? != Membership::Interior {
            return Err(GeometryError::NotInterior);
        }
        base_point_of(&self.domain, x)
    }

    /// c_t(x) = s(x) + e^t (x - s(x)).
    pub fn flow(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        let s = self.base_point(x)?;
        let f = t.exp();
        Ok(s.iter().zip(x).map(|(si, xi)| si + f * (xi - si)).collect())
    }
}

fn base_point_of(d: &ConvexDomain, x: &[f64]) -> Result<Vec<f64>> {
    match d {
        ConvexDomain::HPoly(h) => base_point_poly(h, x),
        ConvexDomain::Paraboloid { n } => {
            let mut s: Vec<f64> = x[..*n - 1].to_vec();
            let q = s.iter().map(|v| v * v).sum();
            s.push(q);
            Ok(s)
        }
        ConvexDomain::Ball { .. } => Err(GeometryError::FoliationViolated(
            "asymptotic cone is trivial".into(),
        )),
        ConvexDomain::Lorentz { n } => Ok(vec![0.0; *n]),
        ConvexDomain::Hyperbola => Err(GeometryError::FoliationViolated(
            "sections are not translates of the asymptotic cone".into(),
        )),
        ConvexDomain::Product { factors } => {
            let mut s = Vec::with_capacity(x.len());
            let mut off = 0;
            for f in factors {
                let nf = f.ambient_dim();
                let comp = &x[off..off + nf];
                let cone = asymptotic_cone(f)?;
                if cone.dim() == cone.lineality_basis().len() {
                    // bounded factor or pure subspace: the leaf fixes it
                    s.extend_from_slice(comp);
                } else {
                    s.extend(base_point_of(f, comp)?);
                }
                off += nf;
            }
            Ok(s)
        }
        ConvexDomain::AffineImage { map, inv, base } => {
            let s = base_point_of(base, &inv.apply_slice(x))?;
            Ok(map.apply_slice(&s))
        }
        ConvexDomain::Homogenized { base } => Ok(vec![0.0; base.ambient_dim() + 1]),
        ConvexDomain::Join(_) => Err(GeometryError::Unsupported(
            "foliation of join representations".into(),
        )),
    }
}

/// Exact apex for polyhedra: the section through x, reduced modulo cone
/// lineality, must have a unique vertex.
fn base_point_poly(h: &HPoly, x: &[f64]) -> Result<Vec<f64>> {
    let xr = vec_from_f64(x).ok_or(GeometryError::NotInterior)?;
    let cone = Cone::poly(h.a().clone());
    let span = cone
        .span_basis_rat()
        .expect("polyhedral cones have exact spans");
    let lin = h.a().null_space();
    let w = span_mod_lineality(&span, &lin, h.n());
    if w.is_empty() {
        return Err(GeometryError::FoliationViolated(
            "asymptotic cone is a subspace, no apex exists".into(),
        ));
    }
    let rows: Vec<Vec<Rat>> = h
        .a()
        .rows
        .iter()
        .map(|row| w.iter().map(|col| dot(row, col)).collect())
        .collect();
    let rhs: Vec<Rat> = h
        .a()
        .rows
        .iter()
        .zip(h.b())
        .map(|(row, bi)| bi - dot(row, &xr))
        .collect();
    let section = HPoly::new(RatMat::new(rows, w.len()), rhs)
        .map_err(|_| GeometryError::FoliationViolated("degenerate section".into()))?;
    let verts = section.vertices();
    match verts.len() {
        1 => {
            let z = &verts[0];
            let s: Vec<Rat> = (0..h.n())
                .map(|i| {
                    &xr[i]
                        + w.iter()
                            .zip(z)
                            .map(|(col, zj)| &col[i] * zj)
                            .fold(Rat::zero(), |a, b| a + b)
                })
                .collect();
            Ok(vec_to_f64(&s))
        }
        0 => Err(GeometryError::FoliationViolated(
            "section has no vertex".into(),
        )),
        _ => Err(GeometryError::FoliationViolated(
            "section apex is not unique".into(),
        )),
    }
}

/// Basis of span ∩ lineality-orthocomplement.
fn span_mod_lineality(span: &[Vec<Rat>], lin: &[Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
    if lin.is_empty() {
        return span.to_vec();
    }
    let g = RatMat::new(
        lin.iter()
            .map(|l| span.iter().map(|v| dot(l, v)).collect())
            .collect(),
        span.len(),
    );
    g.null_space()
        .iter()
        .map(|c| {
            (0..n)
                .map(|i| {
                    span.iter()
                        .zip(c)
                        .map(|(v, cj)| &v[i] * cj)
                        .fold(Rat::zero(), |a, b| a + b)
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct FoliationReport {
    pub samples: usize,
    pub max_violation: f64,
    pub flagged: bool,
    pub notes: Vec<String>,
}

/// Samples the two inclusions behind the leaf decomposition: s(x) + AC lies
/// in the closure, and leaf points lie in s(x) + AC.
pub fn verify_foliation<R: Rng>(
    chart: &FoliationChart,
    samples: usize,
    rng: &mut R,
) -> Result<FoliationReport> {
    let d = chart.domain();
    let exact_poly = matches!(d, ConvexDomain::HPoly(_));
    let mut max_violation: f64 = 0.0;
    let mut flagged = false;
    let mut notes = Vec::new();
    let xs = sample::interior_samples(d, rng, samples.max(1))?;
    for x in &xs {
        let s = match chart.base_point(x) {
            Ok(s) => s,
            // samples inside the boundary membership band carry no leaf data
            Err(GeometryError::NotInterior) => continue,
            Err(GeometryError::FoliationViolated(msg)) => {
                flagged = true;
                notes.push(format!("base point failed: {msg}"));
                break;
            }
            Err(e) => return Err(e),
        };
        // forward: s + c in the closure
        for _ in 0..4 {
            let scale = rng.gen_range(0.1..10.0);
            let c = chart.cone().sample_element(rng, scale);
            let p: Vec<f64> = s.iter().zip(&c).map(|(a, b)| a + b).collect();
            let v = if exact_poly {
                exact_closure_violation(d, &p)
            } else {
                d.defect(&p).max(0.0)
            };
            max_violation = max_violation.max(v);
        }
        // converse: leaf points sit in s + AC
        for _ in 0..4 {
            let mut y = x.clone();
            for b in chart.span_basis() {
                let c: f64 = rng.gen_range(-2.0..2.0);
                for (yi, bi) in y.iter_mut().zip(b) {
                    *yi += c * bi;
                }
            }
            if d.contains(&y)? != Membership::Interior {
                continue;
            }
            let u: Vec<f64> = y.iter().zip(&s).map(|(a, b)| a - b).collect();
            max_violation = max_violation.max(chart.cone().distance(&u));
        }
    }
    if max_violation > 1e-6 {
        flagged = true;
        notes.push("leaf inclusion violated beyond tolerance".into());
    }
    Ok(FoliationReport { samples, max_violation, flagged, notes })
}

fn exact_closure_violation(d: &ConvexDomain, p: &[f64]) -> f64 {
    match (d, vec_from_f64(p)) {
        (ConvexDomain::HPoly(h), Some(pr)) => match h.contains_rat(&pr) {
            Membership::Outside => d.defect(p).max(0.0),
            _ => 0.0,
        },
        _ => d.defect(p).max(0.0),
    }
}

#[derive(Debug, Clone)]
pub struct ExtremeDecomposition {
    /// Base-point images of random interior points: a sample of S.
    pub s_sample: Vec<Vec<f64>>,
    /// Extreme directions of the asymptotic cone as points at infinity.
    pub e_inf: Vec<ProjectivePoint>,
    /// Whether the infinity part is exhaustive or only sampled.
    pub e_inf_exhaustive: bool,
    /// Every sampled S point passed the extremality probe.
    pub s_extreme_ok: bool,
    /// Sampled finite extreme boundary points were matched to S.
    pub extreme_on_s_ok: bool,
    pub notes: Vec<String>,
}

/// Sampled check of the decomposition of extreme points into the finite part
/// S and the extreme directions at infinity.
pub fn extreme_decomposition<R: Rng>(
    d: &ConvexDomain,
    samples: usize,
    rng: &mut R,
) -> Result<ExtremeDecomposition> {
    let chart = FoliationChart::new(d.clone())?;
    let n = d.ambient_dim();
    let mut notes = Vec::new();
    let mut s_sample = Vec::new();
    for x in sample::interior_samples(d, rng, samples.max(1))? {
        s_sample.push(chart.base_point(&x)?);
    }
    let (e_inf_dirs, e_inf_exhaustive) = match chart.cone().extreme_rays() {
        Some(rays) => (rays, true),
        None => {
            notes.push("cone has a continuum of extreme rays; sampling directions".into());
            let mut dirs = Vec::new();
            for _ in 0..samples.min(32).max(4) {
                dirs.push(cone_boundary_direction(chart.cone(), rng));
            }
            dirs.retain(|v| v.iter().any(|x| x.abs() > 1e-9));
            (dirs, false)
        }
    };
    let e_inf = e_inf_dirs
        .iter()
        .map(|u| ProjectivePoint::at_infinity(u))
        .collect::<Result<Vec<_>>>()?;
    // (a) no boundary segment through a sampled S point
    let mut s_extreme_ok = true;
    for s in &s_sample {
        if !is_extreme_point(d, s, rng, n)? {
            s_extreme_ok = false;
            notes.push("sampled S point lies on a boundary segment".into());
            break;
        }
    }
    // (b) finite extreme boundary points accumulate on S; restricted to a
    // moderate scale so the nearby-interior probe stays well conditioned
    let mut extreme_on_s_ok = true;
    let boundary = sample::boundary_samples(d, rng, samples.min(64))?;
    let wit = d.witness();
    for b in &boundary {
        let scale = b.iter().map(|v| v.abs()).fold(1.0, f64::max);
        if scale > 20.0 || !is_extreme_point(d, b, rng, n)? {
            continue;
        }
        let eps = 1e-6;
        let x: Vec<f64> = b.iter().zip(&wit).map(|(a, w)| a + eps * (w - a)).collect();
        let s = chart.base_point(&x)?;
        let dist = b
            .iter()
            .zip(&s)
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            .sqrt();
        if dist > 1e-2 * scale {
            extreme_on_s_ok = false;
            notes.push(format!("extreme boundary point {dist:.2e} away from S"));
        }
    }
    Ok(ExtremeDecomposition {
        s_sample,
        e_inf,
        e_inf_exhaustive,
        s_extreme_ok,
        extreme_on_s_ok,
        notes,
    })
}

/// Boundary point with a zero-dimensional face; falls back to a random
/// segment probe when the face computation is unsupported.
fn is_extreme_point<R: Rng>(d: &ConvexDomain, b: &[f64], rng: &mut R, n: usize) -> Result<bool> {
    match d.face_of(b) {
        Ok(f) => Ok(f.dim == 0),
        Err(GeometryError::Unsupported(_)) => {
            let delta = 1e-4;
            for _ in 0..16 {
                let u = sample::unit_vector(rng, n);
                let p: Vec<f64> = b.iter().zip(&u).map(|(a, v)| a + delta * v).collect();
                let m: Vec<f64> = b.iter().zip(&u).map(|(a, v)| a - delta * v).collect();
                if d.defect(&p) <= 1e-9 && d.defect(&m) <= 1e-9 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Err(e) => Err(e),
    }
}

fn cone_boundary_direction<R: Rng>(cone: &Cone, rng: &mut R) -> Vec<f64> {
    if let ConeRepr::Lorentz { n } = cone.repr() {
        let u = sample::unit_vector(rng, *n - 1);
        let mut v = vec![1.0];
        v.extend(u);
        return v;
    }
    // generic fallback: walk from an interior direction toward the exterior
    let inside = cone.interior_direction();
    let n = inside.len();
    let u = sample::unit_vector(rng, n);
    let mut lo = 0.0;
    let mut hi = 1.0;
    let at = |t: f64| -> Vec<f64> {
        inside
            .iter()
            .zip(&u)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect()
    };
    if cone.contains(&at(1.0), 1e-9) {
        return at(1.0);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if cone.contains(&at(mid), 1e-12) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}
