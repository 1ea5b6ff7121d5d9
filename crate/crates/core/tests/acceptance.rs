//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single pass/fail line so the suite doubles as a verification report.

use nalgebra::DMatrix;
use rand::Rng;

use cpg_core::catalog;
use cpg_core::classify::{
    canonical_representative, classify, invariant_profile, verify_witness, ClassLabel,
};
use cpg_core::cone::{asymptotic_cone, ConeRepr};
use cpg_core::domain::{ConvexDomain, Membership, RayHit};
use cpg_core::foliation::{verify_foliation, FoliationChart};
use cpg_core::hilbert::hilbert_distance;
use cpg_core::limits::{affine_kernel_check, analyze_limit, KernelVerdict, SequenceSpec};
use cpg_core::projective::{cross_ratio, ProjectivePoint};
use cpg_core::rat::{rat_int, vec_to_f64, RatMat};
use cpg_core::sample;

fn report(name: &str, r: Result<(), String>) {
    match r {
        Ok(()) => println!("{name}: pass"),
        Err(e) => {
            println!("{name}: fail ({e})");
            panic!("{name}: {e}");
        }
    }
}

fn orthant(n: usize, k: usize) -> ConvexDomain {
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for i in 0..k {
        let mut row = vec![rat_int(0); n];
        row[i] = rat_int(-1);
        rows.push(row);
        b.push(rat_int(0));
    }
    ConvexDomain::hpoly(RatMat::new(rows, n), b).unwrap()
}

fn by_name(name: &str) -> ConvexDomain {
    catalog::lookup(name).expect("catalog name").domain
}

fn moderate(samples: Vec<Vec<f64>>, cap: f64) -> Vec<Vec<f64>> {
    samples
        .into_iter()
        .filter(|x| x.iter().all(|v| v.abs() <= cap))
        .collect()
}

#[test]
fn criterion_01_closed_form_distance() {
    report("criterion 01 closed-form distances on interval and disc", (|| {
        let interval =
            ConvexDomain::hpoly_f64(&[vec![1.0], vec![-1.0]], &[1.0, 1.0]).unwrap();
        let disc = ConvexDomain::Ball { n: 2 };
        for i in 1..=20 {
            let x = -0.99 + i as f64 * 1.98 / 21.0;
            let expect = ((1.0 + x) / (1.0 - x)).ln().abs();
            let d1 = hilbert_distance(&interval, &[0.0], &[x]).map_err(|e| e.to_string())?;
            let d2 = hilbert_distance(&disc, &[0.0, 0.0], &[x, 0.0]).map_err(|e| e.to_string())?;
            for d in [d1, d2] {
                if (d - expect).abs() > 1e-9 * expect.max(1e-30) {
                    return Err(format!("x = {x}: got {d}, expected {expect}"));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_02_metric_axioms() {
    report("criterion 02 metric axioms on four domains", (|| {
        let domains = [
            by_name("ball2"),
            ConvexDomain::Paraboloid { n: 2 },
            by_name("quadrant"),
            ConvexDomain::Paraboloid { n: 3 },
        ];
        let mut rng = sample::rng(0x0acc_0002);
        for d in &domains {
            let pts = sample::interior_samples(d, &mut rng, 3000).map_err(|e| e.to_string())?;
            for tri in pts.chunks_exact(3).take(1000) {
                let (p, q, r) = (&tri[0], &tri[1], &tri[2]);
                let dpq = hilbert_distance(d, p, q).map_err(|e| e.to_string())?;
                let dqp = hilbert_distance(d, q, p).map_err(|e| e.to_string())?;
                let dpr = hilbert_distance(d, p, r).map_err(|e| e.to_string())?;
                let dqr = hilbert_distance(d, q, r).map_err(|e| e.to_string())?;
                if (dpq - dqp).abs() > 1e-12 * (1.0 + dpq.abs()) {
                    return Err(format!("symmetry violated: {dpq} vs {dqp}"));
                }
                if dpq + dqr - dpr < -1e-9 {
                    return Err(format!(
                        "triangle inequality violated: {dpr} > {dpq} + {dqr}"
                    ));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_03_projective_invariance() {
    report("criterion 03 projective invariance on the disc", (|| {
        let d = by_name("ball2");
        let mut rng = sample::rng(0x0acc_0003);
        for _ in 0..10 {
            let m = loop {
                let cand = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0f64));
                if cand.determinant().abs() > 1e-2 {
                    break cand;
                }
            };
            let pts = sample::interior_samples(&d, &mut rng, 200).map_err(|e| e.to_string())?;
            for pair in pts.chunks_exact(2).take(100) {
                let (p, q) = (&pair[0], &pair[1]);
                let dh = hilbert_distance(&d, p, q).map_err(|e| e.to_string())?;
                let diff: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
                let norm = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm < 1e-12 {
                    continue;
                }
                let u: Vec<f64> = diff.iter().map(|v| v / norm).collect();
                let neg: Vec<f64> = u.iter().map(|v| -v).collect();
                let RayHit::Finite { point: s2, .. } =
                    d.boundary_hit(p, &u).map_err(|e| e.to_string())?
                else {
                    return Err("disc chord must be finite".into());
                };
                let RayHit::Finite { point: s1, .. } =
                    d.boundary_hit(p, &neg).map_err(|e| e.to_string())?
                else {
                    return Err("disc chord must be finite".into());
                };
                let img = |x: &[f64]| {
                    let v = &m * ProjectivePoint::from_affine(x).coords();
                    ProjectivePoint::new(v).unwrap()
                };
                let cr = cross_ratio(&img(&s1), &img(&s2), &img(p), &img(q))
                    .map_err(|e| e.to_string())?;
                let dt = cr.ln().abs();
                if (dh - dt).abs() > 1e-8 {
                    return Err(format!("mapped cross-ratio {dt} vs distance {dh}"));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_04_asymptotic_cone_sampling() {
    report("criterion 04 asymptotic cone definitional sampling", (|| {
        let mut rng = sample::rng(0x0acc_0004);
        for entry in catalog::entries() {
            let d = &entry.domain;
            let n = d.ambient_dim();
            let cone = asymptotic_cone(d).map_err(|e| e.to_string())?;
            if let ConvexDomain::HPoly(h) = d {
                match cone.repr() {
                    ConeRepr::Poly { a } if a == h.a() => {}
                    _ => {
                        return Err(format!(
                            "{}: polyhedral recession cone is not the exact {{u : Au <= 0}}",
                            entry.name
                        ))
                    }
                }
            }
            let x0 = d.witness();
            if cone.dim() > 0 {
                for _ in 0..200 {
                    let u = cone.sample_element(&mut rng, 1.0);
                    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm < 1e-9 {
                        continue;
                    }
                    for t in [1.0, 100.0, 1e4] {
                        let y: Vec<f64> =
                            x0.iter().zip(&u).map(|(x, ui)| x + t * ui / norm).collect();
                        if d.contains(&y).map_err(|e| e.to_string())? == Membership::Outside {
                            return Err(format!(
                                "{}: cone direction exits at t = {t}",
                                entry.name
                            ));
                        }
                    }
                }
            }
            let mut found = 0;
            let mut attempts = 0;
            while found < 200 && attempts < 20_000 {
                attempts += 1;
                let u = sample::unit_vector(&mut rng, n);
                if cone.distance(&u) < 0.05 {
                    continue;
                }
                found += 1;
                let exits = [1.0, 10.0, 100.0, 1e3, 1e4].iter().any(|t| {
                    let y: Vec<f64> = x0.iter().zip(&u).map(|(x, ui)| x + t * ui).collect();
                    matches!(d.contains(&y), Ok(Membership::Outside))
                });
                if !exits {
                    return Err(format!(
                        "{}: margin-outside direction {u:?} never exits",
                        entry.name
                    ));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_05_foliation() {
    report("criterion 05 asymptotic foliation", (|| {
        let mut rng = sample::rng(0x0acc_0005);
        for name in ["parabola-x-rplus", "quadrant-x-r", "paraboloid3"] {
            let chart = FoliationChart::new(by_name(name)).map_err(|e| e.to_string())?;
            let rep = verify_foliation(&chart, 1000, &mut rng).map_err(|e| e.to_string())?;
            if rep.flagged || rep.max_violation > 1e-8 {
                return Err(format!(
                    "{name}: violation {} (flagged: {})",
                    rep.max_violation, rep.flagged
                ));
            }
        }
        // The hyperbola region is divisible but carries no asymptotic-cone
        // foliation; the checker must flag it.
        match FoliationChart::new(ConvexDomain::Hyperbola) {
            Err(_) => {}
            Ok(chart) => {
                let rep = verify_foliation(&chart, 200, &mut rng).map_err(|e| e.to_string())?;
                if !rep.flagged {
                    return Err("hyperbola counterexample was not flagged".into());
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_06_flow_contraction() {
    report("criterion 06 flow contraction and semigroup law", (|| {
        let mut rng = sample::rng(0x0acc_0006);
        for d in [ConvexDomain::Paraboloid { n: 2 }, ConvexDomain::Paraboloid { n: 3 }] {
            let chart = FoliationChart::new(d.clone()).map_err(|e| e.to_string())?;
            let pts = moderate(
                sample::interior_samples(&d, &mut rng, 4000).map_err(|e| e.to_string())?,
                20.0,
            );
            for pair in pts.chunks_exact(2).take(1000) {
                let (x, y) = (&pair[0], &pair[1]);
                let dxy = hilbert_distance(&d, x, y).map_err(|e| e.to_string())?;
                for t in [0.1, 1.0, 10.0] {
                    let cx = chart.flow(x, t).map_err(|e| e.to_string())?;
                    let cy = chart.flow(y, t).map_err(|e| e.to_string())?;
                    let dc = hilbert_distance(&d, &cx, &cy).map_err(|e| e.to_string())?;
                    if dc > dxy + 1e-9 {
                        return Err(format!("t = {t}: {dc} > {dxy}"));
                    }
                }
                let two_step = chart
                    .flow(&chart.flow(x, 1.0).map_err(|e| e.to_string())?, 0.1)
                    .map_err(|e| e.to_string())?;
                let one_step = chart.flow(x, 1.1).map_err(|e| e.to_string())?;
                for (a, b) in two_step.iter().zip(&one_step) {
                    if (a - b).abs() > 1e-9 * (1.0 + b.abs()) {
                        return Err(format!("semigroup law: {two_step:?} vs {one_step:?}"));
                    }
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_07_strict_iff_ray_cone() {
    report("criterion 07 strict convexity vs asymptotic cone dimension", (|| {
        use ClassLabel::*;
        let paraboloid_family = [
            PARABOLA,
            PARABOLA_x_R,
            PARABOLA_x_R2,
            PARABOLOID_3,
            PARABOLOID3_x_R,
            PARABOLOID_4,
        ];
        for entry in catalog::entries() {
            // The equivalence is a quasi-homogeneity theorem; the strictly
            // convex non-QH extras (disc, hyperbola region) are outside it.
            if !entry.quasi_homogeneous {
                continue;
            }
            let profile = invariant_profile(&entry.domain).map_err(|e| e.to_string())?;
            if paraboloid_family.contains(&entry.expected_class) {
                if !(profile.strictly_convex && profile.ac_dim == 1) {
                    return Err(format!(
                        "{}: paraboloid family must be strict with ray cone, got {profile:?}",
                        entry.name
                    ));
                }
            } else if profile.ac_dim >= 2 && profile.strictly_convex {
                return Err(format!(
                    "{}: strictly convex with ac_dim {}",
                    entry.name, profile.ac_dim
                ));
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_08_classification_round_trip() {
    report("criterion 08 classification of affine conjugates", (|| {
        let mut rng = sample::rng(0x0acc_0008);
        for entry in catalog::entries() {
            let n = entry.domain.ambient_dim();
            for rep in 0..50 {
                let map = sample::random_affine_map(&mut rng, n);
                let img = ConvexDomain::affine_image(map, entry.domain.clone())
                    .map_err(|e| e.to_string())?;
                let c = classify(&img).map_err(|e| e.to_string())?;
                if c.label != entry.expected_class {
                    return Err(format!(
                        "{} conjugate {rep}: classified {} instead of {}",
                        entry.name,
                        c.label.name(),
                        entry.expected_class.name()
                    ));
                }
                if rep == 0 {
                    if let Some(w) = &c.witness {
                        let canonical = canonical_representative(c.label)
                            .ok_or_else(|| format!("{}: witness without model", entry.name))?;
                        let ok = verify_witness(&img, &canonical, w, 1000)
                            .map_err(|e| e.to_string())?;
                        if !ok {
                            return Err(format!("{}: witness fails membership", entry.name));
                        }
                    }
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_09_conic_faces() {
    report("criterion 09 conic-face verdicts", (|| {
        let simplex = ConvexDomain::hpoly_f64(
            &[vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
            &[0.0, 0.0, 1.0],
        )
        .unwrap();
        for v in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] {
            let f = simplex.face_of(&v).map_err(|e| e.to_string())?;
            let verdict = simplex.is_conic_face(&f).map_err(|e| e.to_string())?;
            if !verdict.conic || verdict.witness.is_empty() {
                return Err(format!("simplex vertex {v:?} should be conic with a chain"));
            }
        }
        let pxr = by_name("parabola-x-rplus");
        let f = pxr.face_of(&[0.0, 0.0, 1.0]).map_err(|e| e.to_string())?;
        if f.dim != 1 {
            return Err(format!("axis face should be a ray, got dim {}", f.dim));
        }
        if pxr.is_conic_face(&f).map_err(|e| e.to_string())?.conic {
            return Err("axis face of parabola x R+ must be non-conic".into());
        }
        let parabola = ConvexDomain::Paraboloid { n: 2 };
        for x in [-1.5, 0.0, 0.7] {
            let f = parabola.face_of(&[x, x * x]).map_err(|e| e.to_string())?;
            if parabola.is_conic_face(&f).map_err(|e| e.to_string())?.conic {
                return Err(format!("parabola point face at x = {x} must be non-conic"));
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_10_limit_lemmas() {
    report("criterion 10 singular limit lemmas", (|| {
        let parabola = ConvexDomain::Paraboloid { n: 2 };
        let octant = orthant(3, 3);
        let mut cases: Vec<(ConvexDomain, SequenceSpec)> = vec![
            (
                parabola.clone(),
                SequenceSpec::DiagPowers { entries: vec![0.5, 0.25] },
            ),
            (
                octant.clone(),
                SequenceSpec::DiagPowers {
                    entries: vec![std::f64::consts::E, 1.0, 1.0 / std::f64::consts::E],
                },
            ),
            (
                parabola.clone(),
                SequenceSpec::DiagPowers { entries: vec![1.0, 1.0] },
            ),
        ];
        let mut rng = sample::rng(0x0acc_0010);
        for _ in 0..10 {
            let entries: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0f64).exp()).collect();
            cases.push((octant.clone(), SequenceSpec::DiagPowers { entries }));
        }
        for _ in 0..10 {
            let l: f64 = rng.gen_range(0.4..0.95);
            cases.push((
                parabola.clone(),
                SequenceSpec::DiagPowers { entries: vec![l, l * l] },
            ));
        }
        for (i, (d, seq)) in cases.iter().enumerate() {
            let rep = analyze_limit(d, seq, 60, 1000).map_err(|e| e.to_string())?;
            if rep.converged && rep.limit_map.is_singular() {
                if rep.kernel_meets_interior || rep.range_meets_interior {
                    return Err(format!("case {i}: K or R meets the interior"));
                }
                if rep.range_support_ok == Some(false) {
                    return Err(format!("case {i}: face at R escapes R"));
                }
            }
        }
        let contraction = SequenceSpec::DiagPowers { entries: vec![0.5, 0.5] };
        let verdict = affine_kernel_check(&contraction, 60).map_err(|e| e.to_string())?;
        if verdict != KernelVerdict::Holds {
            return Err(format!("contraction family verdict {verdict}, expected holds"));
        }
        Ok(())
    })());
}

#[test]
fn criterion_11_osculating_ellipsoid() {
    report("criterion 11 osculating ellipsoid test", (|| {
        use cpg_core::domain::osculating::osculating_ellipsoid_test;
        let mut rng = sample::rng(0x0acc_0011);
        let ball = by_name("ball2");
        let paraboloid = ConvexDomain::Paraboloid { n: 3 };
        let mut smooth: Vec<(ConvexDomain, Vec<f64>)> = Vec::new();
        for b in sample::boundary_samples(&ball, &mut rng, 10).map_err(|e| e.to_string())? {
            smooth.push((ball.clone(), b));
        }
        for _ in 0..10 {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            smooth.push((paraboloid.clone(), vec![x, y, x * x + y * y]));
        }
        for (d, b) in &smooth {
            {
                let rep = osculating_ellipsoid_test(&d, b).map_err(|e| e.to_string())?;
                if !rep.ok {
                    return Err(format!("smooth point {b:?} rejected: {:?}", rep.reason));
                }
                if rep.richardson_error > 1e-4 {
                    return Err(format!(
                        "stencil disagreement {} at {b:?}",
                        rep.richardson_error
                    ));
                }
            }
        }
        let square = ConvexDomain::hpoly_f64(
            &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            &[1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        for _ in 0..10 {
            let map = sample::random_affine_map(&mut rng, 2);
            let img = ConvexDomain::affine_image(map, square.clone()).map_err(|e| e.to_string())?;
            let ConvexDomain::HPoly(h) = &img else {
                return Err("mapped square should stay polyhedral".into());
            };
            let vertex = vec_to_f64(&h.vertices()[0]);
            let rep = osculating_ellipsoid_test(&img, &vertex).map_err(|e| e.to_string())?;
            if rep.ok {
                return Err(format!("polytope vertex {vertex:?} accepted"));
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_12_unbounded_faces() {
    report("criterion 12 positive-dimensional faces are unbounded", (|| {
        let mut rng = sample::rng(0x0acc_0012);
        let mut total = 0;
        for entry in catalog::entries() {
            if !entry.quasi_homogeneous || !entry.domain.has_boundary() {
                continue;
            }
            let pts = sample::boundary_samples(&entry.domain, &mut rng, 30)
                .map_err(|e| e.to_string())?;
            for x in &pts {
                total += 1;
                let f = entry.domain.face_of(x).map_err(|e| e.to_string())?;
                if f.dim > 0 && f.bounded {
                    return Err(format!(
                        "{}: bounded face of dim {} at {x:?}",
                        entry.name, f.dim
                    ));
                }
            }
        }
        if total < 500 {
            return Err(format!("only {total} boundary points sampled"));
        }
        Ok(())
    })());
}
