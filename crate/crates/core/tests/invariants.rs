//! Property-based invariants: metric axioms, invariance under automorphisms,
//! cone scale invariance, serialization round trips, and flow laws.

use proptest::prelude::*;
use std::f64::consts::TAU;

use cpg_core::affine::AffineMap;
use cpg_core::classify::{classify, ClassLabel};
use cpg_core::cone::asymptotic_cone;
use cpg_core::domain::json::{domain_from_json, domain_to_json};
use cpg_core::domain::{ConvexDomain, Membership, RayHit};
use cpg_core::foliation::FoliationChart;
use cpg_core::hilbert::hilbert_distance;
use nalgebra::{DMatrix, DVector};

fn disc() -> ConvexDomain {
    ConvexDomain::Ball { n: 2 }
}

fn parabola() -> ConvexDomain {
    ConvexDomain::Paraboloid { n: 2 }
}

/// x' = lx + c, y' = l^2 y + 2lc x + c^2 maps y > x^2 onto itself.
fn parabola_automorphism(l: f64, c: f64) -> AffineMap {
    AffineMap::new(
        DMatrix::from_row_slice(2, 2, &[l, 0.0, 2.0 * l * c, l * l]),
        DVector::from_vec(vec![c, c * c]),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hilbert_symmetric_and_nonnegative(
        r1 in 0.0..0.95f64, a1 in 0.0..TAU,
        r2 in 0.0..0.95f64, a2 in 0.0..TAU,
    ) {
        let d = disc();
        let p = [r1 * a1.cos(), r1 * a1.sin()];
        let q = [r2 * a2.cos(), r2 * a2.sin()];
        let dpq = hilbert_distance(&d, &p, &q).unwrap();
        let dqp = hilbert_distance(&d, &q, &p).unwrap();
        prop_assert!(dpq >= 0.0);
        prop_assert_eq!(dpq, dqp);
    }

    #[test]
    fn hilbert_invariant_under_parabola_automorphisms(
        x1 in -2.0..2.0f64, e1 in 0.01..4.0f64,
        x2 in -2.0..2.0f64, e2 in 0.01..4.0f64,
        l in 0.3..3.0f64, c in -2.0..2.0f64,
    ) {
        let d = parabola();
        let g = parabola_automorphism(l, c);
        let p = [x1, x1 * x1 + e1];
        let q = [x2, x2 * x2 + e2];
        let before = hilbert_distance(&d, &p, &q).unwrap();
        let after = hilbert_distance(&d, &g.apply_slice(&p), &g.apply_slice(&q)).unwrap();
        prop_assert!((before - after).abs() <= 1e-8 * (1.0 + before));
    }

    #[test]
    fn cone_distance_is_scale_invariant(
        ux in -1.0..1.0f64, uy in -1.0..1.0f64, uz in -1.0..1.0f64,
        scale in 0.01..100.0f64,
    ) {
        prop_assume!(ux.abs() + uy.abs() + uz.abs() > 1e-3);
        let cone = asymptotic_cone(&ConvexDomain::Lorentz { n: 3 }).unwrap();
        let d1 = cone.distance(&[ux, uy, uz]);
        let d2 = cone.distance(&[scale * ux, scale * uy, scale * uz]);
        prop_assert!((d1 - d2).abs() <= 1e-12);
    }

    #[test]
    fn json_round_trip_preserves_membership(
        bx in 0.1..5.0f64, by in 0.1..5.0f64,
        px in -6.0..6.0f64, py in -6.0..6.0f64,
    ) {
        let d = ConvexDomain::hpoly_f64(
            &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            &[bx, bx, by, by],
        )
        .unwrap();
        let text = serde_json::to_string(&domain_to_json(&d).unwrap()).unwrap();
        let back = domain_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        let p = [px, py];
        prop_assert_eq!(d.contains(&p).unwrap(), back.contains(&p).unwrap());
    }

    #[test]
    fn flow_satisfies_semigroup_law(
        x in -2.0..2.0f64, e in 0.01..4.0f64,
        s in -1.0..1.0f64, t in -1.0..1.0f64,
    ) {
        let chart = FoliationChart::new(parabola()).unwrap();
        let p = [x, x * x + e];
        let two = chart.flow(&chart.flow(&p, s).unwrap(), t).unwrap();
        let one = chart.flow(&p, s + t).unwrap();
        for (a, b) in two.iter().zip(&one) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn boundary_hit_lands_on_boundary(
        r in 0.0..0.9f64, a in 0.0..TAU, dir in 0.0..TAU,
    ) {
        let d = disc();
        let p = [r * a.cos(), r * a.sin()];
        let u = [dir.cos(), dir.sin()];
        let RayHit::Finite { t, point } = d.boundary_hit(&p, &u).unwrap() else {
            return Err(TestCaseError::fail("disc rays always terminate"));
        };
        prop_assert!(t > 0.0);
        prop_assert_eq!(d.contains(&point).unwrap(), Membership::Boundary);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quadrant_label_survives_diagonal_scaling(
        sx in 0.1..10.0f64, sy in 0.1..10.0f64, shear in -2.0..2.0f64,
    ) {
        let quadrant = ConvexDomain::hpoly_f64(
            &[vec![-1.0, 0.0], vec![0.0, -1.0]],
            &[0.0, 0.0],
        )
        .unwrap();
        let map = AffineMap::new(
            DMatrix::from_row_slice(2, 2, &[sx, shear, 0.0, sy]),
            DVector::from_vec(vec![0.0, 0.0]),
        )
        .unwrap();
        let img = ConvexDomain::affine_image(map, quadrant).unwrap();
        prop_assert_eq!(classify(&img).unwrap().label, ClassLabel::QUADRANT);
    }
}
