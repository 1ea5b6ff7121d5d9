//! Affine invariants and the classification of convex domains of dimension
//! at most 4, with normalization witnesses where a canonical representative
//! exists.

use crate::affine::AffineMap;
use crate::cone::{asymptotic_cone, Cone};
use crate::domain::{hpoly, ConvexDomain, Membership};
use crate::error::{GeometryError, Result};
use crate::foliation::FoliationChart;
use crate::rat::{vec_to_f64, Rat, RatMat};
use crate::sample;
use crate::simplex::{solve_lp, LpResult};
use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvariantProfile {
    pub n: usize,
    /// Dimension of the lineality space (the R^k factor).
    pub k: usize,
    pub proper_factor_dim: usize,
    /// Dimension of the asymptotic cone of the properly convex factor.
    pub ac_dim: usize,
    pub is_cone: bool,
    /// Strict convexity of the properly convex factor.
    pub strictly_convex: bool,
    pub properly_convex: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(non_camel_case_types)]
pub enum ClassLabel {
    PLANE,
    HALF_PLANE,
    QUADRANT,
    PARABOLA,
    SPACE_3,
    HALF_SPACE_3,
    QUADRANT_x_R,
    PARABOLA_x_R,
    PARABOLOID_3,
    PARABOLA_x_RPLUS,
    SIMPLEX_CONE_3,
    STRICT_CONE_3,
    SPACE_4,
    HALF_SPACE_4,
    QUADRANT_x_R2,
    PARABOLA_x_R2,
    PARABOLOID3_x_R,
    PARABOLA_x_RPLUS_x_R,
    CONE3_x_R,
    PARABOLOID_4,
    PROPER_CONE_4,
    NOT_CLASSIFIED,
}

impl ClassLabel {
    pub fn name(&self) -> &'static str {
        use ClassLabel::*;
        match self {
            PLANE => "PLANE",
            HALF_PLANE => "HALF_PLANE",
            QUADRANT => "QUADRANT",
            PARABOLA => "PARABOLA",
            SPACE_3 => "SPACE_3",
            HALF_SPACE_3 => "HALF_SPACE_3",
            QUADRANT_x_R => "QUADRANT_x_R",
            PARABOLA_x_R => "PARABOLA_x_R",
            PARABOLOID_3 => "PARABOLOID_3",
            PARABOLA_x_RPLUS => "PARABOLA_x_RPLUS",
            SIMPLEX_CONE_3 => "SIMPLEX_CONE_3",
            STRICT_CONE_3 => "STRICT_CONE_3",
            SPACE_4 => "SPACE_4",
            HALF_SPACE_4 => "HALF_SPACE_4",
            QUADRANT_x_R2 => "QUADRANT_x_R2",
            PARABOLA_x_R2 => "PARABOLA_x_R2",
            PARABOLOID3_x_R => "PARABOLOID3_x_R",
            PARABOLA_x_RPLUS_x_R => "PARABOLA_x_RPLUS_x_R",
            CONE3_x_R => "CONE3_x_R",
            PARABOLOID_4 => "PARABOLOID_4",
            PROPER_CONE_4 => "PROPER_CONE_4",
            NOT_CLASSIFIED => "NOT_CLASSIFIED",
        }
    }

    pub fn from_name(s: &str) -> Option<ClassLabel> {
        use ClassLabel::*;
        let all = [
            PLANE, HALF_PLANE, QUADRANT, PARABOLA, SPACE_3, HALF_SPACE_3, QUADRANT_x_R,
            PARABOLA_x_R, PARABOLOID_3, PARABOLA_x_RPLUS, SIMPLEX_CONE_3, STRICT_CONE_3,
            SPACE_4, HALF_SPACE_4, QUADRANT_x_R2, PARABOLA_x_R2, PARABOLOID3_x_R,
            PARABOLA_x_RPLUS_x_R, CONE3_x_R, PARABOLOID_4, PROPER_CONE_4, NOT_CLASSIFIED,
        ];
        all.into_iter().find(|l| l.name() == s)
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalClass {
    pub label: ClassLabel,
    pub profile: InvariantProfile,
    /// Invertible affine map sending the domain onto the canonical
    /// representative; absent for residual classes.
    pub witness: Option<AffineMap>,
    /// Violated prerequisite for NOT_CLASSIFIED results.
    pub reason: Option<String>,
}

pub fn invariant_profile(d: &ConvexDomain) -> Result<InvariantProfile> {
    let n = d.ambient_dim();
    let k = d.lineality_basis().len();
    let cone = asymptotic_cone(d)?;
    let ac_total = cone.dim();
    let proper_factor_dim = n - k;
    let ac_dim = ac_total.saturating_sub(k);
    let is_cone = cone_apex(d, &cone)?.is_some();
    let conv = d.classify_convexity()?;
    Ok(InvariantProfile {
        n,
        k,
        proper_factor_dim,
        ac_dim,
        is_cone,
        strictly_convex: factor_strict(d),
        properly_convex: conv.properly_convex,
    })
}

/// Apex of the domain when it is a translated cone: a point s with
/// D = s + AC(D). Exact for polyhedra, sampled otherwise.
fn cone_apex(d: &ConvexDomain, cone: &Cone) -> Result<Option<Vec<f64>>> {
    if cone.dim() != d.ambient_dim() {
        return Ok(None);
    }
    if let ConvexDomain::HPoly(h) = d {
        // D = s + {Au <= 0} exactly when every inequality is tight at s
        return Ok(h.a().solve(h.b()).map(|s| vec_to_f64(&s)));
    }
    let chart = match FoliationChart::new(d.clone()) {
        Ok(c) => c,
        Err(GeometryError::FoliationViolated(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let s = match chart.base_point(&d.witness()) {
        Ok(s) => s,
        Err(GeometryError::FoliationViolated(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut rng = sample::rng(0xc0de);
    for x in sample::interior_samples(d, &mut rng, 24)? {
        let u: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a - b).collect();
        if cone.distance(&u) > 1e-6 {
            return Ok(None);
        }
    }
    Ok(Some(s))
}

/// Strict convexity of the properly convex factor, decided on the
/// representation (space factors and lineality are ignored).
fn factor_strict(d: &ConvexDomain) -> bool {
    match d {
        ConvexDomain::HPoly(h) => h.n() - h.lineality().len() <= 1,
        ConvexDomain::Paraboloid { .. } | ConvexDomain::Ball { .. } | ConvexDomain::Hyperbola => {
            true
        }
        ConvexDomain::Lorentz { .. } => false,
        ConvexDomain::Product { factors } => {
            let with_boundary: Vec<_> = factors.iter().filter(|f| f.has_boundary()).collect();
            match with_boundary.len() {
                0 => true,
                1 => factor_strict(with_boundary[0]),
                _ => false,
            }
        }
        ConvexDomain::AffineImage { base, .. } => factor_strict(base),
        ConvexDomain::Homogenized { base } => base.ambient_dim() == 0,
        ConvexDomain::Join(j) => j.intrinsic_dim() <= 1,
    }
}

pub fn classify(d: &ConvexDomain) -> Result<CanonicalClass> {
    let n = d.ambient_dim();
    if !(2..=4).contains(&n) {
        return Err(GeometryError::Unsupported(
            "classification covers ambient dimensions 2 through 4".into(),
        ));
    }
    let profile = invariant_profile(d)?;
    if d.is_bounded() {
        return Ok(not_classified(profile, "bounded domain cannot be quasi-homogeneous"));
    }
    if between_parallel_hyperplanes(d)? {
        return Ok(not_classified(profile, "domain lies between parallel hyperplanes"));
    }
    if has_bounded_positive_face(d)? {
        return Ok(not_classified(
            profile,
            "boundary contains a bounded face of positive dimension",
        ));
    }
    use ClassLabel::*;
    let m = profile.proper_factor_dim;
    let a = profile.ac_dim;
    let label = match m {
        0 => match n {
            2 => PLANE,
            3 => SPACE_3,
            _ => SPACE_4,
        },
        1 => match n {
            2 => HALF_PLANE,
            3 => HALF_SPACE_3,
            _ => HALF_SPACE_4,
        },
        2 => {
            if profile.is_cone {
                match n {
                    2 => QUADRANT,
                    3 => QUADRANT_x_R,
                    _ => QUADRANT_x_R2,
                }
            } else if a == 1 && profile.strictly_convex {
                match n {
                    2 => PARABOLA,
                    3 => PARABOLA_x_R,
                    _ => PARABOLA_x_R2,
                }
            } else {
                return Ok(not_classified(
                    profile,
                    "recession structure matches no planar quasi-homogeneous family",
                ));
            }
        }
        3 => {
            if profile.is_cone {
                match poly_facets(d) {
                    Some((count, rank)) if count == 3 && rank == 3 => {
                        if n == 3 { SIMPLEX_CONE_3 } else { CONE3_x_R }
                    }
                    Some(_) => {
                        return Ok(not_classified(
                            profile,
                            "polyhedral 3-cone with more than three facets",
                        ));
                    }
                    None => {
                        if n == 3 { STRICT_CONE_3 } else { CONE3_x_R }
                    }
                }
            } else if a == 1 && profile.strictly_convex {
                if n == 3 { PARABOLOID_3 } else { PARABOLOID3_x_R }
            } else if a == 2 {
                if n == 3 { PARABOLA_x_RPLUS } else { PARABOLA_x_RPLUS_x_R }
            } else {
                return Ok(not_classified(
                    profile,
                    "recession structure matches no 3-dimensional quasi-homogeneous family",
                ));
            }
        }
        _ => {
            if profile.is_cone {
                match poly_facets(d) {
                    Some((count, rank)) if count == 4 && rank == 4 => PROPER_CONE_4,
                    Some(_) => {
                        return Ok(not_classified(
                            profile,
                            "polyhedral 4-cone with more than four facets",
                        ));
                    }
                    None => PROPER_CONE_4,
                }
            } else if a == 1 && profile.strictly_convex {
                PARABOLOID_4
            } else {
                return Ok(not_classified(
                    profile,
                    "recession structure matches no 4-dimensional quasi-homogeneous family",
                ));
            }
        }
    };
    let witness = build_witness(d, label);
    Ok(CanonicalClass { label, profile, witness, reason: None })
}

fn not_classified(profile: InvariantProfile, reason: &str) -> CanonicalClass {
    CanonicalClass {
        label: ClassLabel::NOT_CLASSIFIED,
        profile,
        witness: None,
        reason: Some(reason.to_string()),
    }
}

fn poly_facets(d: &ConvexDomain) -> Option<(usize, usize)> {
    match d {
        ConvexDomain::HPoly(h) => Some((h.m(), h.a().rank())),
        _ => None,
    }
}

/// Is some linear functional bounded above and below on the domain?
fn between_parallel_hyperplanes(d: &ConvexDomain) -> Result<bool> {
    Ok(match d {
        ConvexDomain::HPoly(h) => {
            // a slab direction is realized by a facet normal bounded below
            (0..h.m()).any(|i| {
                matches!(
                    solve_lp(
                        &h.a().rows[i],
                        h.a(),
                        h.b(),
                        &RatMat::new(vec![], h.n()),
                        &[],
                    ),
                    LpResult::Optimal { .. }
                )
            })
        }
        ConvexDomain::Ball { .. } => true,
        ConvexDomain::Paraboloid { .. }
        | ConvexDomain::Lorentz { .. }
        | ConvexDomain::Hyperbola
        | ConvexDomain::Homogenized { .. } => false,
        ConvexDomain::Product { factors } => {
            for f in factors {
                if between_parallel_hyperplanes(f)? {
                    return Ok(true);
                }
            }
            false
        }
        ConvexDomain::AffineImage { base, .. } => between_parallel_hyperplanes(base)?,
        ConvexDomain::Join(_) => d.is_bounded(),
    })
}

fn has_bounded_positive_face(d: &ConvexDomain) -> Result<bool> {
    if let ConvexDomain::HPoly(h) = d {
        return Ok(poly_has_bounded_positive_face(h));
    }
    let mut rng = sample::rng(0xface);
    let pts = match sample::boundary_samples(d, &mut rng, 24) {
        Ok(p) => p,
        Err(_) => return Ok(false),
    };
    for b in &pts {
        match d.face_of(b) {
            Ok(f) => {
                if f.bounded && f.dim > 0 {
                    return Ok(true);
                }
            }
            Err(GeometryError::Unsupported(_)) => return Ok(false),
            Err(_) => continue,
        }
    }
    Ok(false)
}

/// Exact enumeration of faces by active set, up to codimension n-1.
fn poly_has_bounded_positive_face(h: &hpoly::HPoly) -> bool {
    let n = h.n();
    let m = h.m();
    if n < 2 {
        return false;
    }
    for size in 1..n {
        for s in hpoly::subsets(m, size) {
            let active = RatMat::new(s.iter().map(|&i| h.a().rows[i].clone()).collect(), n);
            let rank = active.rank();
            if n - rank < 1 {
                continue;
            }
            let null = active.null_space();
            if null.is_empty() {
                continue;
            }
            // recession cone of the face: {z : (A N) z <= 0}
            let reduced = RatMat::new(
                h.a()
                    .rows
                    .iter()
                    .map(|row| null.iter().map(|v| crate::rat::dot(row, v)).collect())
                    .collect(),
                null.len(),
            );
            if !hpoly::cone_is_trivial(&reduced) {
                continue;
            }
            // is there a point with exactly this active set?
            if face_nonempty(h, &s) {
                return true;
            }
        }
    }
    false
}

/// Feasibility of a_i x = b_i (i in s), a_j x + t <= b_j (j not in s), t > 0.
fn face_nonempty(h: &hpoly::HPoly, s: &[usize]) -> bool {
    let n = h.n();
    let nv = n + 1;
    let mut ub_rows = Vec::new();
    let mut ub_b = Vec::new();
    for j in 0..h.m() {
        if s.contains(&j) {
            continue;
        }
        let mut row = h.a().rows[j].clone();
        row.push(Rat::from_integer(1.into()));
        ub_rows.push(row);
        ub_b.push(h.b()[j].clone());
    }
    let mut cap = vec![Rat::zero(); nv];
    cap[n] = Rat::from_integer(1.into());
    ub_rows.push(cap);
    ub_b.push(Rat::from_integer(1.into()));
    let eq_rows: Vec<Vec<Rat>> = s
        .iter()
        .map(|&i| {
            let mut row = h.a().rows[i].clone();
            row.push(Rat::zero());
            row
        })
        .collect();
    let eq_b: Vec<Rat> = s.iter().map(|&i| h.b()[i].clone()).collect();
    let mut c = vec![Rat::zero(); nv];
    c[n] = -Rat::from_integer(1.into());
    match solve_lp(&c, &RatMat::new(ub_rows, nv), &ub_b, &RatMat::new(eq_rows, nv), &eq_b) {
        LpResult::Optimal { value, .. } => value < Rat::zero(),
        _ => false,
    }
}

// ---- canonical representatives and witnesses ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum AtomKind {
    Strict,
    Cone,
    Space,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Atom {
    kind: AtomKind,
    dim: usize,
}

fn atom_domain(a: &Atom) -> ConvexDomain {
    match a.kind {
        AtomKind::Strict => ConvexDomain::paraboloid(a.dim).expect("atom dims are >= 2"),
        AtomKind::Cone => ConvexDomain::orthant(a.dim),
        AtomKind::Space => ConvexDomain::space(a.dim),
    }
}

fn expected_atoms(label: ClassLabel) -> Option<Vec<Atom>> {
    use AtomKind::*;
    use ClassLabel::*;
    let strict = |d| Atom { kind: Strict, dim: d };
    let cone = |d| Atom { kind: Cone, dim: d };
    let space = |d| Atom { kind: Space, dim: d };
    Some(match label {
        PLANE => vec![space(2)],
        SPACE_3 => vec![space(3)],
        SPACE_4 => vec![space(4)],
        HALF_PLANE => vec![cone(1), space(1)],
        HALF_SPACE_3 => vec![cone(1), space(2)],
        HALF_SPACE_4 => vec![cone(1), space(3)],
        QUADRANT => vec![cone(2)],
        QUADRANT_x_R => vec![cone(2), space(1)],
        QUADRANT_x_R2 => vec![cone(2), space(2)],
        PARABOLA => vec![strict(2)],
        PARABOLA_x_R => vec![strict(2), space(1)],
        PARABOLA_x_R2 => vec![strict(2), space(2)],
        PARABOLOID_3 => vec![strict(3)],
        PARABOLOID3_x_R => vec![strict(3), space(1)],
        PARABOLOID_4 => vec![strict(4)],
        PARABOLA_x_RPLUS => vec![strict(2), cone(1)],
        PARABOLA_x_RPLUS_x_R => vec![strict(2), cone(1), space(1)],
        SIMPLEX_CONE_3 => vec![cone(3)],
        STRICT_CONE_3 | CONE3_x_R | PROPER_CONE_4 | NOT_CLASSIFIED => return None,
    })
}

/// Standard form of each classified family, with the properly convex part in
/// the leading coordinates and the lineality factor last; None for residual
/// families.
pub fn canonical_representative(label: ClassLabel) -> Option<ConvexDomain> {
    let atoms = expected_atoms(label)?;
    ConvexDomain::product(atoms.iter().map(atom_domain).collect()).ok()
}

/// Decompose the representation into canonical atoms together with an affine
/// map realizing the decomposition in the listed coordinate order.
fn atoms_of(d: &ConvexDomain) -> Option<(AffineMap, Vec<Atom>)> {
    match d {
        ConvexDomain::HPoly(h) => poly_atoms(h),
        ConvexDomain::Paraboloid { n } => Some((
            AffineMap::identity(*n),
            vec![Atom { kind: AtomKind::Strict, dim: *n }],
        )),
        ConvexDomain::Product { factors } => {
            let n = d.ambient_dim();
            let mut linear = DMatrix::zeros(n, n);
            let mut translation = DVector::zeros(n);
            let mut atoms = Vec::new();
            let mut off = 0;
            for f in factors {
                let nf = f.ambient_dim();
                let (t, mut a) = atoms_of(f)?;
                linear.view_mut((off, off), (nf, nf)).copy_from(&t.linear);
                translation.rows_mut(off, nf).copy_from(&t.translation);
                atoms.append(&mut a);
                off += nf;
            }
            Some((AffineMap::new(linear, translation).ok()?, atoms))
        }
        ConvexDomain::AffineImage { inv, base, .. } => {
            let (t, atoms) = atoms_of(base)?;
            Some((t.compose(inv), atoms))
        }
        _ => None,
    }
}

/// Exact polyhedral decomposition: a translated orthant times a space
/// factor, or nothing.
fn poly_atoms(h: &hpoly::HPoly) -> Option<(AffineMap, Vec<Atom>)> {
    let n = h.n();
    let lin = h.lineality();
    let k = lin.len();
    let m = n - k;
    if m == 0 {
        return Some((AffineMap::identity(n), vec![Atom { kind: AtomKind::Space, dim: n }]));
    }
    if h.m() != m || h.a().rank() != m {
        return None;
    }
    let s = h.a().solve(h.b())?;
    let mut rows: Vec<Vec<f64>> = h
        .a()
        .rows
        .iter()
        .map(|r| vec_to_f64(r).iter().map(|v| -v).collect())
        .collect();
    for l in &lin {
        rows.push(vec_to_f64(l));
    }
    let linear = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let sf = vec_to_f64(&s);
    let translation = -&linear * DVector::from_column_slice(&sf);
    let map = AffineMap::new(linear, translation).ok()?;
    if !map.is_invertible() {
        return None;
    }
    let mut atoms = vec![Atom { kind: AtomKind::Cone, dim: m }];
    if k > 0 {
        atoms.push(Atom { kind: AtomKind::Space, dim: k });
    }
    Some((map, atoms))
}

fn merge_atoms(atoms: &[Atom]) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    for a in atoms {
        match out.last_mut() {
            Some(prev) if prev.kind == a.kind && a.kind != AtomKind::Strict => {
                prev.dim += a.dim;
            }
            _ => out.push(*a),
        }
    }
    out
}

fn build_witness(d: &ConvexDomain, label: ClassLabel) -> Option<AffineMap> {
    let target = merge_atoms(&expected_atoms(label)?);
    let (t, atoms) = atoms_of(d)?;
    // stable sort of atom blocks into Strict, Cone, Space order
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by_key(|&i| atoms[i].kind);
    let mut starts = Vec::with_capacity(atoms.len());
    let mut acc = 0;
    for a in &atoms {
        starts.push(acc);
        acc += a.dim;
    }
    let n = acc;
    let mut perm = DMatrix::zeros(n, n);
    let mut row = 0;
    let mut sorted = Vec::new();
    for &i in &order {
        for j in 0..atoms[i].dim {
            perm[(row, starts[i] + j)] = 1.0;
            row += 1;
        }
        sorted.push(atoms[i]);
    }
    if merge_atoms(&sorted) != target {
        return None;
    }
    let p = AffineMap::new(perm, DVector::zeros(n)).ok()?;
    let witness = p.compose(&t);
    // sampled soundness check in both directions
    let canonical = canonical_representative(label)?;
    verify_witness(d, &canonical, &witness, 50).ok()?.then_some(witness)
}

/// Two-sided sampled membership agreement through the witness map.
pub fn verify_witness(
    d: &ConvexDomain,
    canonical: &ConvexDomain,
    witness: &AffineMap,
    samples: usize,
) -> Result<bool> {
    let mut rng = sample::rng(0x817);
    let inv = witness.inverse()?;
    for x in sample::interior_samples(d, &mut rng, samples)? {
        if canonical.contains(&witness.apply_slice(&x))? == Membership::Outside {
            return Ok(false);
        }
    }
    for y in sample::interior_samples(canonical, &mut rng, samples)? {
        if d.contains(&inv.apply_slice(&y))? == Membership::Outside {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::*;

    fn label_of(d: &ConvexDomain) -> ClassLabel {
        classify(d).unwrap().label
    }

    #[test]
    fn parabola_with_identity_witness() {
        let d = ConvexDomain::paraboloid(2).unwrap();
        let c = classify(&d).unwrap();
        assert_eq!(c.label, PARABOLA);
        let w = c.witness.unwrap();
        assert!((w.linear.clone() - DMatrix::<f64>::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn profile_examples() {
        let d = ConvexDomain::product(vec![
            ConvexDomain::paraboloid(2).unwrap(),
            ConvexDomain::orthant(1),
        ])
        .unwrap();
        let p = invariant_profile(&d).unwrap();
        assert_eq!((p.k, p.ac_dim), (0, 2));
        assert!(!p.is_cone && !p.strictly_convex && p.properly_convex);

        let p3 = invariant_profile(&ConvexDomain::paraboloid(3).unwrap()).unwrap();
        assert_eq!((p3.k, p3.ac_dim), (0, 1));
        assert!(p3.strictly_convex);

        let q = ConvexDomain::product(vec![ConvexDomain::space(1), ConvexDomain::orthant(2)])
            .unwrap();
        let pq = invariant_profile(&q).unwrap();
        assert_eq!(pq.k, 1);
        assert!(pq.is_cone);
    }

    #[test]
    fn two_dimensional_labels() {
        assert_eq!(label_of(&ConvexDomain::space(2)), PLANE);
        assert_eq!(label_of(&ConvexDomain::halfspace(2)), HALF_PLANE);
        assert_eq!(label_of(&ConvexDomain::orthant(2)), QUADRANT);
        assert_eq!(label_of(&ConvexDomain::paraboloid(2).unwrap()), PARABOLA);
    }

    #[test]
    fn three_dimensional_labels() {
        assert_eq!(label_of(&ConvexDomain::space(3)), SPACE_3);
        assert_eq!(label_of(&ConvexDomain::halfspace(3)), HALF_SPACE_3);
        assert_eq!(label_of(&ConvexDomain::paraboloid(3).unwrap()), PARABOLOID_3);
        assert_eq!(label_of(&ConvexDomain::orthant(3)), SIMPLEX_CONE_3);
        assert_eq!(label_of(&ConvexDomain::lorentz(3).unwrap()), STRICT_CONE_3);
        let qr = ConvexDomain::product(vec![ConvexDomain::orthant(2), ConvexDomain::space(1)])
            .unwrap();
        assert_eq!(label_of(&qr), QUADRANT_x_R);
        let pr = ConvexDomain::product(vec![
            ConvexDomain::paraboloid(2).unwrap(),
            ConvexDomain::space(1),
        ])
        .unwrap();
        assert_eq!(label_of(&pr), PARABOLA_x_R);
        let prp = ConvexDomain::product(vec![
            ConvexDomain::paraboloid(2).unwrap(),
            ConvexDomain::orthant(1),
        ])
        .unwrap();
        assert_eq!(label_of(&prp), PARABOLA_x_RPLUS);
    }

    #[test]
    fn four_dimensional_labels() {
        assert_eq!(label_of(&ConvexDomain::space(4)), SPACE_4);
        assert_eq!(label_of(&ConvexDomain::halfspace(4)), HALF_SPACE_4);
        assert_eq!(label_of(&ConvexDomain::paraboloid(4).unwrap()), PARABOLOID_4);
        assert_eq!(label_of(&ConvexDomain::lorentz(4).unwrap()), PROPER_CONE_4);
        assert_eq!(label_of(&ConvexDomain::orthant(4)), PROPER_CONE_4);
        let c3r = ConvexDomain::product(vec![
            ConvexDomain::lorentz(3).unwrap(),
            ConvexDomain::space(1),
        ])
        .unwrap();
        assert_eq!(label_of(&c3r), CONE3_x_R);
        let p3r = ConvexDomain::product(vec![
            ConvexDomain::paraboloid(3).unwrap(),
            ConvexDomain::space(1),
        ])
        .unwrap();
        assert_eq!(label_of(&p3r), PARABOLOID3_x_R);
        let prpr = ConvexDomain::product(vec![
            ConvexDomain::paraboloid(2).unwrap(),
            ConvexDomain::orthant(1),
            ConvexDomain::space(1),
        ])
        .unwrap();
        assert_eq!(label_of(&prpr), PARABOLA_x_RPLUS_x_R);
    }

    #[test]
    fn bounded_domain_rejected() {
        let c = classify(&ConvexDomain::ball(2).unwrap()).unwrap();
        assert_eq!(c.label, NOT_CLASSIFIED);
        assert!(c.reason.unwrap().contains("bounded"));
    }

    #[test]
    fn slab_rejected() {
        let d = ConvexDomain::hpoly_f64(&[vec![0.0, 1.0], vec![0.0, -1.0]], &[1.0, 0.0])
            .unwrap();
        let c = classify(&d).unwrap();
        assert_eq!(c.label, NOT_CLASSIFIED);
        assert!(c.reason.unwrap().contains("parallel hyperplanes"));
    }

    #[test]
    fn hyperbola_not_classified() {
        let c = classify(&ConvexDomain::hyperbola()).unwrap();
        assert_eq!(c.label, NOT_CLASSIFIED);
        assert!(!c.profile.is_cone);
        assert_eq!(c.profile.ac_dim, 2);
    }

    #[test]
    fn bounded_face_rejected() {
        // y > 0, y > x - 1, y > -x - 1: the bottom edge is a bounded facet
        let d = ConvexDomain::hpoly_f64(
            &[vec![0.0, -1.0], vec![1.0, -1.0], vec![-1.0, -1.0]],
            &[0.0, 1.0, 1.0],
        )
        .unwrap();
        let c = classify(&d).unwrap();
        assert_eq!(c.label, NOT_CLASSIFIED);
        assert!(c.reason.unwrap().contains("bounded face"));
    }

    #[test]
    fn many_faceted_cone_rejected() {
        // cone over a square: 4 facets through the origin in R^3
        let d = ConvexDomain::hpoly_f64(
            &[
                vec![1.0, 0.0, -1.0],
                vec![-1.0, 0.0, -1.0],
                vec![0.0, 1.0, -1.0],
                vec![0.0, -1.0, -1.0],
            ],
            &[0.0; 4],
        )
        .unwrap();
        let c = classify(&d).unwrap();
        assert_eq!(c.label, NOT_CLASSIFIED);
        assert!(c.reason.unwrap().contains("facets"));
    }

    #[test]
    fn affine_image_recovers_paraboloid() {
        let mut rng = sample::rng(33);
        for _ in 0..5 {
            let t = sample::random_affine_map(&mut rng, 3);
            let d = ConvexDomain::affine_image(t, ConvexDomain::paraboloid(3).unwrap()).unwrap();
            let c = classify(&d).unwrap();
            assert_eq!(c.label, PARABOLOID_3);
            let w = c.witness.expect("witness expected");
            let canonical = canonical_representative(PARABOLOID_3).unwrap();
            assert!(verify_witness(&d, &canonical, &w, 200).unwrap());
        }
    }

    #[test]
    fn affine_invariance_of_labels() {
        let mut rng = sample::rng(34);
        let domains = [
            ConvexDomain::orthant(2),
            ConvexDomain::paraboloid(2).unwrap(),
            ConvexDomain::lorentz(3).unwrap(),
            ConvexDomain::product(vec![
                ConvexDomain::paraboloid(2).unwrap(),
                ConvexDomain::orthant(1),
            ])
            .unwrap(),
        ];
        for d in &domains {
            let base = label_of(d);
            for _ in 0..5 {
                let t = sample::random_affine_map(&mut rng, d.ambient_dim());
                let td = ConvexDomain::affine_image(t, d.clone()).unwrap();
                assert_eq!(label_of(&td), base, "{base:?}");
            }
        }
    }

    #[test]
    fn residual_classes_have_no_witness() {
        for d in [
            ConvexDomain::lorentz(3).unwrap(),
            ConvexDomain::lorentz(4).unwrap(),
        ] {
            let c = classify(&d).unwrap();
            assert!(c.witness.is_none());
        }
        assert!(canonical_representative(STRICT_CONE_3).is_none());
        assert!(canonical_representative(PROPER_CONE_4).is_none());
    }

    #[test]
    fn polyhedral_witnesses_are_exact() {
        // shifted and sheared quadrant
        let d = ConvexDomain::hpoly_f64(&[vec![-1.0, -1.0], vec![1.0, -1.0]], &[2.0, 0.0])
            .unwrap();
        let c = classify(&d).unwrap();
        assert_eq!(c.label, QUADRANT);
        let w = c.witness.unwrap();
        let canonical = canonical_representative(QUADRANT).unwrap();
        assert!(verify_witness(&d, &canonical, &w, 200).unwrap());
    }

    #[test]
    fn strict_implies_paraboloid_family() {
        for d in [
            ConvexDomain::paraboloid(2).unwrap(),
            ConvexDomain::paraboloid(3).unwrap(),
            ConvexDomain::paraboloid(4).unwrap(),
        ] {
            let c = classify(&d).unwrap();
            assert!(matches!(c.label, PARABOLA | PARABOLOID_3 | PARABOLOID_4));
        }
    }
}
