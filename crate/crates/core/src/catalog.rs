//! Named reference domains.
//!
//! Each entry pairs a domain with the class it should land in, so tools and
//! tests can pull standard examples by name. The list covers every
//! quasi-homogeneous class in dimensions 2 through 4, plus two
//! non-quasi-homogeneous extras (a disc and the hyperbola region) that are
//! useful as counterexamples.

use crate::classify::ClassLabel;
use crate::domain::ConvexDomain;
use crate::rat::{rat_int, Rat, RatMat};

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub domain: ConvexDomain,
    pub expected_class: ClassLabel,
    /// How the domain is built, in words.
    pub provenance: &'static str,
    /// Whether the domain admits a cocompact quasi-homogeneous action.
    pub quasi_homogeneous: bool,
}

fn orthant(n: usize, k: usize) -> ConvexDomain {
    let mut rows = Vec::new();
    let mut b: Vec<Rat> = Vec::new();
    for i in 0..k {
        let mut row = vec![rat_int(0); n];
        row[i] = rat_int(-1);
        rows.push(row);
        b.push(rat_int(0));
    }
    ConvexDomain::hpoly(RatMat::new(rows, n), b).expect("orthant constraints are valid")
}

fn space(n: usize) -> ConvexDomain {
    orthant(n, 0)
}

fn half_space(n: usize) -> ConvexDomain {
    orthant(n, 1)
}

fn product(factors: Vec<ConvexDomain>) -> ConvexDomain {
    ConvexDomain::Product { factors }
}

/// All catalog entries, in a fixed order.
pub fn entries() -> Vec<CatalogEntry> {
    use ClassLabel::*;
    let parabola = || ConvexDomain::Paraboloid { n: 2 };
    let e = |name, domain, expected_class, provenance, quasi_homogeneous| CatalogEntry {
        name,
        domain,
        expected_class,
        provenance,
        quasi_homogeneous,
    };
    vec![
        e("plane2", space(2), PLANE, "the affine plane", true),
        e(
            "half-plane2",
            half_space(2),
            HALF_PLANE,
            "open half plane x > 0",
            true,
        ),
        e(
            "quadrant",
            orthant(2, 2),
            QUADRANT,
            "open positive quadrant x, y > 0",
            true,
        ),
        e(
            "parabola",
            parabola(),
            PARABOLA,
            "epigraph of the parabola, y > x^2",
            true,
        ),
        e("space3", space(3), SPACE_3, "affine 3-space", true),
        e(
            "half-space3",
            half_space(3),
            HALF_SPACE_3,
            "open half space x > 0 in dimension 3",
            true,
        ),
        e(
            "parabola-x-r",
            product(vec![parabola(), space(1)]),
            PARABOLA_x_R,
            "parabola epigraph times a line",
            true,
        ),
        e(
            "quadrant-x-r",
            orthant(3, 2),
            QUADRANT_x_R,
            "positive quadrant times a line",
            true,
        ),
        e(
            "parabola-x-rplus",
            product(vec![parabola(), half_space(1)]),
            PARABOLA_x_RPLUS,
            "parabola epigraph times an open ray",
            true,
        ),
        e(
            "paraboloid3",
            ConvexDomain::Paraboloid { n: 3 },
            PARABOLOID_3,
            "epigraph of the round paraboloid, z > x^2 + y^2",
            true,
        ),
        e(
            "simplex-cone3",
            orthant(3, 3),
            SIMPLEX_CONE_3,
            "open positive octant x, y, z > 0",
            true,
        ),
        e(
            "elliptic-cone3",
            ConvexDomain::Lorentz { n: 3 },
            STRICT_CONE_3,
            "round Lorentz cone x > sqrt(y^2 + z^2), a strictly convex proper cone",
            true,
        ),
        e("space4", space(4), SPACE_4, "affine 4-space", true),
        e(
            "half-space4",
            half_space(4),
            HALF_SPACE_4,
            "open half space x > 0 in dimension 4",
            true,
        ),
        e(
            "parabola-x-r2",
            product(vec![parabola(), space(2)]),
            PARABOLA_x_R2,
            "parabola epigraph times a plane",
            true,
        ),
        e(
            "quadrant-x-r2",
            orthant(4, 2),
            QUADRANT_x_R2,
            "positive quadrant times a plane",
            true,
        ),
        e(
            "paraboloid3-x-r",
            product(vec![ConvexDomain::Paraboloid { n: 3 }, space(1)]),
            PARABOLOID3_x_R,
            "round paraboloid epigraph times a line",
            true,
        ),
        e(
            "parabola-x-rplus-x-r",
            product(vec![parabola(), half_space(1), space(1)]),
            PARABOLA_x_RPLUS_x_R,
            "parabola epigraph times an open ray times a line",
            true,
        ),
        e(
            "cone3-x-r",
            product(vec![ConvexDomain::Lorentz { n: 3 }, space(1)]),
            CONE3_x_R,
            "round Lorentz cone times a line",
            true,
        ),
        e(
            "proper-cone4",
            ConvexDomain::Lorentz { n: 4 },
            PROPER_CONE_4,
            "round Lorentz cone in dimension 4",
            true,
        ),
        e(
            "ball2",
            ConvexDomain::Ball { n: 2 },
            NOT_CLASSIFIED,
            "open unit disc; bounded, so homogeneous but not quasi-homogeneous under affine maps",
            false,
        ),
        e(
            "hyperbola",
            ConvexDomain::Hyperbola,
            NOT_CLASSIFIED,
            "region x > 0, xy > 1 above one hyperbola branch; divisible but not quasi-homogeneous",
            false,
        ),
    ]
}

pub fn names() -> Vec<&'static str> {
    entries().iter().map(|e| e.name).collect()
}

pub fn lookup(name: &str) -> Option<CatalogEntry> {
    entries().into_iter().find(|e| e.name == name)
}
