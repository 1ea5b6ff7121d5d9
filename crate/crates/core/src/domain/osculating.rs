//! Second-order boundary probing: does the boundary admit an osculating
//! ellipsoid at a point, and with which quadratic form?

use crate::error::{GeometryError, Result};
use nalgebra::{DMatrix, DVector};

use super::{ConvexDomain, Membership};

#[derive(Debug, Clone)]
pub struct OsculatingReport {
    pub ok: bool,
    pub reason: Option<String>,
    /// Quadratic form of the local graph x_n = s^T Q s + o(|s|^2) in the
    /// tangent frame, when ok.
    pub form: Option<DMatrix<f64>>,
    /// Worst disagreement between the h, h/2 and h/4 difference stencils.
    pub richardson_error: f64,
}

impl OsculatingReport {
    fn fail(reason: &str) -> OsculatingReport {
        OsculatingReport {
            ok: false,
            reason: Some(reason.to_string()),
            form: None,
            richardson_error: f64::NAN,
        }
    }
}

/// Probes the boundary at b with centered second differences at mesh sizes
/// h, h/2, h/4 and accepts when the stencils agree and the limiting form is
/// positive definite.
pub fn osculating_ellipsoid_test(d: &ConvexDomain, b: &[f64]) -> Result<OsculatingReport> {
    if d.contains(b)? != Membership::Boundary {
        return Err(GeometryError::NotBoundary);
    }
    let n = d.ambient_dim();
    if n < 2 {
        return Err(GeometryError::Unsupported(
            "osculating test needs ambient dimension at least 2".into(),
        ));
    }
    let planes = d.supporting_hyperplanes(b)?;
    if planes.is_empty() {
        return Err(GeometryError::Invalid("no supporting hyperplane found".into()));
    }
    let normals = DMatrix::from_fn(planes.len(), n, |i, j| planes[i].normal[j]);
    if numeric_rank(&normals) >= 2 {
        return Ok(OsculatingReport::fail("corner point: supporting hyperplane not unique"));
    }
    let mut normal = normalize(&planes[0].normal);
    // orient outward: defect must grow along the normal
    let probe = 1e-6;
    let out_p: Vec<f64> = b.iter().zip(&normal).map(|(x, v)| x + probe * v).collect();
    let out_m: Vec<f64> = b.iter().zip(&normal).map(|(x, v)| x - probe * v).collect();
    if d.defect(&out_p) < d.defect(&out_m) {
        for v in normal.iter_mut() {
            *v = -*v;
        }
    }
    let tangent = tangent_frame(&normal);
    let h = 1e-2;
    let mut forms = Vec::with_capacity(3);
    for scale in [1.0, 0.5, 0.25] {
        match second_difference_form(d, b, &normal, &tangent, h * scale) {
            Some(f) => forms.push(f),
            None => return Ok(OsculatingReport::fail("boundary graph probe failed")),
        }
    }
    let err01 = max_abs_diff(&forms[0], &forms[1]);
    let err12 = max_abs_diff(&forms[1], &forms[2]);
    let richardson_error = err01.max(err12);
    if richardson_error > 1e-4 {
        return Ok(OsculatingReport {
            ok: false,
            reason: Some("difference stencils disagree across mesh refinement".into()),
            form: None,
            richardson_error,
        })
    }
    let hess = forms[2].clone();
    let eigen = hess.clone().symmetric_eigen();
    if eigen.eigenvalues.iter().any(|&l| l < 1e-6) {
        return Ok(OsculatingReport {
            ok: false,
            reason: Some("second fundamental form is not positive definite".into()),
            form: None,
            richardson_error,
        });
    }
    Ok(OsculatingReport {
        ok: true,
        reason: None,
        form: Some(hess / 2.0),
        richardson_error,
    })
}

/// Height of the boundary below the tangent plane at b + offset, measured
/// along the inward normal. None when no crossing is bracketed.
fn graph_height(d: &ConvexDomain, b: &[f64], normal: &[f64], offset: &[f64]) -> Option<f64> {
    let p0: Vec<f64> = b.iter().zip(offset).map(|(x, o)| x + o).collect();
    let at = |alpha: f64| -> f64 {
        let p: Vec<f64> = p0.iter().zip(normal).map(|(x, v)| x - alpha * v).collect();
        d.defect(&p)
    };
    if at(0.0) <= 0.0 {
        return Some(0.0);
    }
    let mut hi = 1e-8;
    while at(hi) > 0.0 {
        hi *= 2.0;
        if hi > 0.5 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if at(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn second_difference_form(
    d: &ConvexDomain,
    b: &[f64],
    normal: &[f64],
    tangent: &[Vec<f64>],
    h: f64,
) -> Option<DMatrix<f64>> {
    let k = tangent.len();
    let f = |s: &[f64]| -> Option<f64> {
        let mut offset = vec![0.0; b.len()];
        for (si, t) in s.iter().zip(tangent) {
            for (o, tv) in offset.iter_mut().zip(t) {
                *o += si * tv;
            }
        }
        graph_height(d, b, normal, &offset)
    };
    let f0 = f(&vec![0.0; k])?;
    let mut hess = DMatrix::zeros(k, k);
    for i in 0..k {
        let mut sp = vec![0.0; k];
        sp[i] = h;
        let mut sm = vec![0.0; k];
        sm[i] = -h;
        hess[(i, i)] = (f(&sp)? - 2.0 * f0 + f(&sm)?) / (h * h);
        for j in i + 1..k {
            let mut spp = vec![0.0; k];
            spp[i] = h;
            spp[j] = h;
            let mut spm = vec![0.0; k];
            spm[i] = h;
            spm[j] = -h;
            let mut smp = vec![0.0; k];
            smp[i] = -h;
            smp[j] = h;
            let mut smm = vec![0.0; k];
            smm[i] = -h;
            smm[j] = -h;
            let v = (f(&spp)? - f(&spm)? - f(&smp)? + f(&smm)?) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Some(hess)
}

/// Orthonormal basis of the hyperplane orthogonal to n.
fn tangent_frame(normal: &[f64]) -> Vec<Vec<f64>> {
    let n = normal.len();
    let mut frame: Vec<DVector<f64>> = vec![DVector::from_column_slice(normal)];
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = 1.0;
        for f in &frame {
            let c = f.dot(&e);
            e -= f * c;
        }
        if e.norm() > 1e-8 {
            e /= e.norm();
            frame.push(e);
        }
        if frame.len() == n {
            break;
        }
    }
    frame[1..].iter().map(|v| v.iter().copied().collect()).collect()
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn numeric_rank(m: &DMatrix<f64>) -> usize {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > 1e-7 * max).count()
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).iter().map(|v| v.abs()).fold(0.0, f64::max)
}
