//! Seeded randomness: interior and boundary sampling of domains, random
//! directions and affine maps.

use crate::affine::AffineMap;
use crate::domain::{ConvexDomain, RayHit};
use crate::error::{GeometryError, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// Chord cap for hit-and-run along recession directions.
const CHORD_CAP: f64 = 1e3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                // Box-Muller
                let u1: f64 = rng.gen_range(1e-12..1.0);
                let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (-2.0 * u1.ln()).sqrt() * u2.cos()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// Hit-and-run walk from the witness. Unbounded chords are capped, so the
/// law is not uniform; the output is a spread of strictly interior points.
pub fn interior_samples<R: Rng>(
    d: &ConvexDomain,
    rng: &mut R,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = d.ambient_dim();
    if n == 0 {
        return Ok(vec![vec![]; count]);
    }
    let mut x = d.witness();
    let mut out = Vec::with_capacity(count);
    let burn = 4;
    let mut kept = 0;
    let mut guard = 0;
    while out.len() < count {
        guard += 1;
        if guard > 40 * burn * count {
            return Err(GeometryError::Invalid("interior sampling stalled".into()));
        }
        let u = unit_vector(rng, n);
        let neg: Vec<f64> = u.iter().map(|v| -v).collect();
        // The walk can drift into the boundary membership band at large
        // coordinates; restart such chains from the witness.
        let (forward, backward) = match (chord_extent(d, &x, &u), chord_extent(d, &x, &neg)) {
            (Ok(f), Ok(b)) => (f, b),
            (Err(GeometryError::NotInterior), _) | (_, Err(GeometryError::NotInterior)) => {
                x = d.witness();
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let r: f64 = rng.gen_range(0.02..0.98);
        let t = -backward + r * (backward + forward);
        for (xi, ui) in x.iter_mut().zip(&u) {
            *xi += t * ui;
        }
        kept += 1;
        if kept % burn == 0 {
            out.push(x.clone());
        }
    }
    Ok(out)
}

fn chord_extent(d: &ConvexDomain, x: &[f64], u: &[f64]) -> Result<f64> {
    Ok(match d.boundary_hit(x, u)? {
        RayHit::Finite { t, .. } => t,
        RayHit::Infinite { .. } => CHORD_CAP,
    })
}

/// Boundary points obtained by shooting rays from interior samples. Domains
/// without boundary yield an empty list.
pub fn boundary_samples<R: Rng>(
    d: &ConvexDomain,
    rng: &mut R,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    if !d.has_boundary() {
        return Ok(vec![]);
    }
    let n = d.ambient_dim();
    let anchors = interior_samples(d, rng, count.max(1))?;
    let mut out = Vec::with_capacity(count);
    let mut misses = 0;
    while out.len() < count {
        let x = &anchors[out.len() % anchors.len()];
        let u = unit_vector(rng, n);
        match d.boundary_hit(x, &u)? {
            RayHit::Finite { point, .. } => out.push(point),
            RayHit::Infinite { .. } => {
                misses += 1;
                if misses > 200 * count {
                    return Err(GeometryError::Invalid(
                        "boundary sampling kept escaping to infinity".into(),
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Invertible affine map with condition number at most 1e3 and bounded
/// translation.
pub fn random_affine_map<R: Rng>(rng: &mut R, n: usize) -> AffineMap {
    loop {
        let linear = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let svd = linear.clone().svd(false, false);
        let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let min = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        if min > 1e-9 && max / min <= 1e3 {
            let t = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            return AffineMap::new(linear, t).expect("square matrices match");
        }
    }
}
