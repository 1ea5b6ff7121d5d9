//! Hilbert metric on properly convex domains and a word-ball upper bound
//! for the induced orbit pseudo-distance.

use crate::affine::AffineMap;
use crate::domain::{ConvexDomain, Membership, RayHit};
use crate::error::{GeometryError, Result};
use crate::sample;
use std::collections::HashMap;

/// d_H(p, q) = |log CR(s1, s2, p, q)| with s1, s2 the chord endpoints.
pub fn hilbert_distance(d: &ConvexDomain, p: &[f64], q: &[f64]) -> Result<f64> {
    Ok(hilbert_distance_detailed(d, p, q)?.distance)
}

#[derive(Debug, Clone)]
pub struct HilbertValue {
    pub distance: f64,
    /// Set when a chord endpoint pair nearly coincides and the log loses
    /// precision.
    pub warning: Option<String>,
}

pub fn hilbert_distance_detailed(d: &ConvexDomain, p: &[f64], q: &[f64]) -> Result<HilbertValue> {
    // Symmetry to the last bit: evaluate in a canonical argument order.
    let (p, q) = if p.iter().lt(q.iter()) { (p, q) } else { (q, p) };
    let conv = d.classify_convexity()?;
    if !conv.properly_convex {
        return Err(GeometryError::NotProperlyConvex);
    }
    for x in [p, q] {
        if d.contains(x)? != Membership::Interior {
            return Err(GeometryError::NotInterior);
        }
    }
    let sep: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let scale = 1.0 + p.iter().chain(q).map(|v| v.abs()).fold(0.0, f64::max);
    if sep <= 1e-14 * scale {
        return Ok(HilbertValue { distance: 0.0, warning: None });
    }
    let u: Vec<f64> = p.iter().zip(q).map(|(a, b)| (b - a) / sep).collect();
    let neg: Vec<f64> = u.iter().map(|v| -v).collect();
    // chord parameters measured from p: s1 at -t_back, q at sep, s2 at t_fwd
    let forward = d.boundary_hit(p, &u)?;
    let backward = d.boundary_hit(p, &neg)?;
    let mut warning = None;
    let distance = match (&forward, &backward) {
        (RayHit::Finite { t: fwd, .. }, RayHit::Finite { t: back, .. }) => {
            if fwd - sep < 1e-10 || *back < 1e-10 {
                warning = Some("chord endpoints nearly coincide with p or q".into());
            }
            (fwd / (fwd - sep)).ln() + ((back + sep) / back).ln()
        }
        (RayHit::Finite { t: fwd, .. }, RayHit::Infinite { .. }) => {
            if fwd - sep < 1e-10 {
                warning = Some("chord endpoint nearly coincides with q".into());
            }
            (fwd / (fwd - sep)).ln()
        }
        (RayHit::Infinite { .. }, RayHit::Finite { t: back, .. }) => {
            if *back < 1e-10 {
                warning = Some("chord endpoint nearly coincides with p".into());
            }
            ((back + sep) / back).ln()
        }
        (RayHit::Infinite { .. }, RayHit::Infinite { .. }) => {
            return Err(GeometryError::Invalid(
                "chord is a full line; domain is not properly convex".into(),
            ));
        }
    };
    Ok(HilbertValue { distance: distance.max(0.0), warning })
}

#[derive(Debug, Clone)]
pub struct NamedMap {
    pub name: String,
    pub map: AffineMap,
}

#[derive(Debug, Clone)]
pub struct OrbitMetricQuery {
    pub generators: Vec<NamedMap>,
    pub radius: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OrbitBound {
    /// min over words w of length <= radius of d_H(w p, q); an upper bound
    /// for the orbit distance.
    pub distance: f64,
    /// Realizing word, outermost letter first; empty for the identity.
    pub word: Vec<String>,
}

/// Word-ball search. Each generator (and its inverse) is first checked to
/// preserve the domain on 100 seeded interior samples.
pub fn orbit_distance(query: &OrbitMetricQuery, d: &ConvexDomain) -> Result<OrbitBound> {
    let mut rng = sample::rng(0x0b17);
    let witnesses = sample::interior_samples(d, &mut rng, 100)?;
    let mut alphabet: Vec<(String, AffineMap)> = Vec::new();
    for (idx, g) in query.generators.iter().enumerate() {
        let inv = g.map.inverse()?;
        for (name, map) in [(g.name.clone(), g.map.clone()), (format!("{}^-1", g.name), inv)] {
            for w in &witnesses {
                let img = map.apply_slice(w);
                if d.contains(&img)? == Membership::Outside {
                    return Err(GeometryError::PreservationFailure {
                        index: idx,
                        witness: w.clone(),
                    });
                }
            }
            alphabet.push((name, map));
        }
    }
    let mut best = OrbitBound {
        distance: hilbert_distance(d, &query.p, &query.q)?,
        word: vec![],
    };
    // frontier of distinct images of p, deduplicated on rounded coordinates
    let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
    let mut frontier: Vec<(Vec<f64>, Vec<String>)> = vec![(query.p.clone(), vec![])];
    seen.insert(key(&query.p), ());
    for _ in 0..query.radius {
        let mut next = Vec::new();
        for (point, word) in &frontier {
            for (name, map) in &alphabet {
                let img = map.apply_slice(point);
                let k = key(&img);
                if seen.contains_key(&k) {
                    continue;
                }
                seen.insert(k, ());
                if d.contains(&img)? == Membership::Interior {
                    let dist = hilbert_distance(d, &img, &query.q)?;
                    let mut w = vec![name.clone()];
                    w.extend(word.iter().cloned());
                    if dist < best.distance {
                        best = OrbitBound { distance: dist, word: w.clone() };
                    }
                    next.push((img, w));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(best)
}

fn key(x: &[f64]) -> Vec<i64> {
    x.iter().map(|v| (v * 1e9).round() as i64).collect()
}
