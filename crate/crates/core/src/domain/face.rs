//! Faces of convex domains and the conic-face test.
//!
//! A face is the equivalence class of a boundary point under "joined by an
//! open segment inside the closure". Polyhedral faces are exact active-set
//! computations; quadric faces are analytic.

use crate::error::{GeometryError, Result};
use crate::projective::ProjectiveSubspace;
use crate::rat::{vec_from_f64, vec_to_f64, Rat, RatMat};
use nalgebra::{DMatrix, DVector};

use super::hpoly::cone_is_trivial;
use super::{ConvexDomain, Membership, EPS};

#[derive(Debug, Clone)]
pub struct FaceDescriptor {
    pub representative: Vec<f64>,
    /// Projectivized affine hull of the face.
    pub support: ProjectiveSubspace,
    pub dim: usize,
    pub bounded: bool,
    /// Active constraint indices, for polyhedral domains.
    pub active: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct ConicVerdict {
    pub conic: bool,
    /// Chain of supporting hyperplanes whose successive intersections
    /// strictly decrease down to the face's support (when conic).
    pub witness: Vec<Hyperplane>,
}

struct FaceParts {
    dirs: Vec<Vec<f64>>,
    bounded: bool,
    active: Option<Vec<usize>>,
}

impl ConvexDomain {
    /// Whether the closure is a bounded set.
    pub fn is_bounded(&self) -> bool {
        match self {
            ConvexDomain::HPoly(h) => cone_is_trivial(h.a()),
            ConvexDomain::Ball { .. } => true,
            ConvexDomain::Paraboloid { .. }
            | ConvexDomain::Lorentz { .. }
            | ConvexDomain::Hyperbola => false,
            ConvexDomain::Product { factors } => factors.iter().all(|f| f.is_bounded()),
            ConvexDomain::AffineImage { base, .. } => base.is_bounded(),
            ConvexDomain::Homogenized { .. } => false,
            ConvexDomain::Join(j) => {
                let (d1, d2) = j.factors();
                d1.is_bounded() && d2.is_bounded()
            }
        }
    }

    pub fn face_of(&self, b: &[f64]) -> Result<FaceDescriptor> {
        if self.contains(b)? != Membership::Boundary {
            return Err(GeometryError::NotBoundary);
        }
        let parts = self.face_parts(b)?;
        Ok(assemble(b, parts))
    }

    fn face_parts(&self, b: &[f64]) -> Result<FaceParts> {
        match self {
            ConvexDomain::HPoly(h) => {
                let active = active_rows(h, b);
                if active.is_empty() {
                    return Err(GeometryError::NotBoundary);
                }
                let sub = RatMat::new(
                    active.iter().map(|&i| h.a().rows[i].clone()).collect(),
                    h.n(),
                );
                let null = sub.null_space();
                let dirs: Vec<Vec<f64>> = null.iter().map(|v| vec_to_f64(v)).collect();
                // Face recession: directions in the face's hull that stay in
                // the closure; the face is bounded iff that cone is trivial.
                let reduced = RatMat::new(
                    h.a()
                        .rows
                        .iter()
                        .map(|row| null.iter().map(|v| crate::rat::dot(row, v)).collect())
                        .collect(),
                    null.len(),
                );
                let bounded = cone_is_trivial(&reduced);
                Ok(FaceParts { dirs, bounded, active: Some(active) })
            }
            ConvexDomain::Paraboloid { .. }
            | ConvexDomain::Ball { .. }
            | ConvexDomain::Hyperbola => Ok(FaceParts { dirs: vec![], bounded: true, active: None }),
            ConvexDomain::Lorentz { .. } => {
                let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm <= EPS {
                    // apex
                    Ok(FaceParts { dirs: vec![], bounded: true, active: None })
                } else {
                    // open ray through b
                    Ok(FaceParts { dirs: vec![b.to_vec()], bounded: false, active: None })
                }
            }
            ConvexDomain::Product { factors } => {
                let n = self.ambient_dim();
                let mut dirs = Vec::new();
                let mut bounded = true;
                let mut off = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    let comp = &b[off..off + d];
                    let embed = |v: &[f64], off: usize| {
                        let mut e = vec![0.0; n];
                        e[off..off + d].copy_from_slice(v);
                        e
                    };
                    match f.contains(comp)? {
                        Membership::Boundary => {
                            let parts = f.face_parts(comp)?;
                            for v in parts.dirs {
                                dirs.push(embed(&v, off));
                            }
                            bounded &= parts.bounded;
                        }
                        Membership::Interior => {
                            // the component sweeps the whole factor
                            for i in 0..d {
                                let mut v = vec![0.0; d];
                                v[i] = 1.0;
                                dirs.push(embed(&v, off));
                            }
                            bounded &= f.is_bounded();
                        }
                        Membership::Outside => return Err(GeometryError::NotBoundary),
                    }
                    off += d;
                }
                Ok(FaceParts { dirs, bounded, active: None })
            }
            ConvexDomain::AffineImage { map, inv, base } => {
                let parts = base.face_parts(&inv.apply_slice(b))?;
                let dirs = parts
                    .dirs
                    .iter()
                    .map(|v| {
                        (&map.linear * DVector::from_column_slice(v))
                            .iter()
                            .copied()
                            .collect()
                    })
                    .collect();
                Ok(FaceParts { dirs, bounded: parts.bounded, active: None })
            }
            ConvexDomain::Homogenized { .. } | ConvexDomain::Join(_) => Err(
                GeometryError::Unsupported("faces of this representation".into()),
            ),
        }
    }

    /// Whether F is realizable as the bottom of a strictly decreasing chain
    /// of n-k supporting-hyperplane intersections.
    pub fn is_conic_face(&self, f: &FaceDescriptor) -> Result<ConicVerdict> {
        // recompute and compare to guard against stale descriptors
        let fresh = self.face_of(&f.representative).map_err(|_| GeometryError::NotAFace)?;
        if fresh.dim != f.dim || !subspace_eq(&fresh.support, &f.support) {
            return Err(GeometryError::NotAFace);
        }
        let n = self.ambient_dim();
        let needed = n - f.dim;
        let planes = self.supporting_hyperplanes(&f.representative)?;
        let mut chain: Vec<Hyperplane> = Vec::new();
        let mut rank = 0;
        for h in planes {
            let mut cand: Vec<Vec<f64>> = chain.iter().map(|c| c.normal.clone()).collect();
            cand.push(h.normal.clone());
            let r = normal_rank(&cand);
            if r > rank {
                rank = r;
                chain.push(h);
            }
            if rank == needed {
                return Ok(ConicVerdict { conic: true, witness: chain });
            }
        }
        Ok(ConicVerdict { conic: false, witness: vec![] })
    }

    /// Supporting hyperplanes of the domain containing the face of b.
    pub(crate) fn supporting_hyperplanes(&self, b: &[f64]) -> Result<Vec<Hyperplane>> {
        match self {
            ConvexDomain::HPoly(h) => Ok(active_rows(h, b)
                .into_iter()
                .map(|i| Hyperplane {
                    normal: vec_to_f64(&h.a().rows[i]),
                    offset: crate::rat::rat_to_f64(&h.b()[i]),
                })
                .collect()),
            ConvexDomain::Paraboloid { n } => {
                let mut normal: Vec<f64> = b[..*n - 1].iter().map(|v| 2.0 * v).collect();
                normal.push(-1.0);
                let offset = normal.iter().zip(b).map(|(a, x)| a * x).sum();
                Ok(vec![Hyperplane { normal, offset }])
            }
            ConvexDomain::Ball { .. } => Ok(vec![Hyperplane { normal: b.to_vec(), offset: 1.0 }]),
            ConvexDomain::Hyperbola => Ok(vec![Hyperplane {
                normal: vec![b[1], b[0]],
                offset: 2.0,
            }]),
            ConvexDomain::Lorentz { n } => {
                let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm <= EPS {
                    // tangent planes along distinct rulings through the apex
                    let mut out = Vec::new();
                    for j in 1..*n {
                        let mut normal = vec![0.0; *n];
                        normal[0] = -1.0;
                        normal[j] = 1.0;
                        out.push(Hyperplane { normal, offset: 0.0 });
                    }
                    let mut normal = vec![0.0; *n];
                    normal[0] = -1.0;
                    normal[1] = -1.0;
                    out.push(Hyperplane { normal, offset: 0.0 });
                    Ok(out)
                } else {
                    let rest = b[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                    let mut normal = vec![-1.0];
                    normal.extend(b[1..].iter().map(|v| v / rest));
                    Ok(vec![Hyperplane { normal, offset: 0.0 }])
                }
            }
            ConvexDomain::Product { factors } => {
                let n = self.ambient_dim();
                let mut out = Vec::new();
                let mut off = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    let comp = &b[off..off + d];
                    if f.contains(comp)? == Membership::Boundary {
                        for h in f.supporting_hyperplanes(comp)? {
                            let mut normal = vec![0.0; n];
                            normal[off..off + d].copy_from_slice(&h.normal);
                            out.push(Hyperplane { normal, offset: h.offset });
                        }
                    }
                    off += d;
                }
                Ok(out)
            }
            ConvexDomain::AffineImage { inv, base, .. } => {
                let planes = base.supporting_hyperplanes(&inv.apply_slice(b))?;
                Ok(planes
                    .into_iter()
                    .map(|h| {
                        let normal: Vec<f64> = (inv.linear.transpose()
                            * DVector::from_column_slice(&h.normal))
                        .iter()
                        .copied()
                        .collect();
                        let shift: f64 = h
                            .normal
                            .iter()
                            .zip(inv.translation.iter())
                            .map(|(a, t)| a * t)
                            .sum();
                        Hyperplane { normal, offset: h.offset - shift }
                    })
                    .collect())
            }
            ConvexDomain::Homogenized { .. } | ConvexDomain::Join(_) => Err(
                GeometryError::Unsupported("supporting hyperplanes of this representation".into()),
            ),
        }
    }
}

fn assemble(b: &[f64], parts: FaceParts) -> FaceDescriptor {
    let n = b.len();
    let mut basis = Vec::with_capacity(parts.dirs.len() + 1);
    let mut point = b.to_vec();
    point.push(1.0);
    basis.push(DVector::from_vec(point));
    for d in &parts.dirs {
        let mut v = d.clone();
        v.push(0.0);
        basis.push(DVector::from_vec(v));
    }
    let dim = parts.dirs.len();
    FaceDescriptor {
        representative: b.to_vec(),
        support: ProjectiveSubspace::new(basis, n),
        dim,
        bounded: parts.bounded,
        active: parts.active,
    }
}

/// Rows active at b, decided on a relative 1e-9 band; combinatorial
/// decisions downstream are exact on the selected rows.
fn active_rows(h: &super::HPoly, b: &[f64]) -> Vec<usize> {
    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    (0..h.m())
        .filter(|&i| {
            let row = vec_to_f64(&h.a().rows[i]);
            let rs: f64 = row.iter().map(|v| v.abs()).sum();
            let v: f64 = row.iter().zip(b).map(|(a, x)| a * x).sum();
            (v - crate::rat::rat_to_f64(&h.b()[i])).abs() <= EPS * scale * rs.max(1.0)
        })
        .collect()
}

fn subspace_eq(a: &ProjectiveSubspace, b: &ProjectiveSubspace) -> bool {
    a.dim() == b.dim()
        && a.basis().iter().all(|v| {
            crate::projective::ProjectivePoint::from_slice(v.as_slice())
                .map(|p| b.contains(&p, 1e-6))
                .unwrap_or(false)
        })
}

fn normal_rank(normals: &[Vec<f64>]) -> usize {
    if normals.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(normals.len(), normals[0].len(), |i, j| normals[i][j]);
    let svd = m.svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > 1e-9 * max).count()
}

/// Exact face activity for rational points (used by tests on polyhedra).
pub fn exact_active_set(h: &super::HPoly, b: &[f64]) -> Option<Vec<usize>> {
    let br = vec_from_f64(b)?;
    Some(h.active_set(&br))
}

#[allow(dead_code)]
fn unused_rat_guard(_: &[Rat]) {}
