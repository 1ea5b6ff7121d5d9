//! Singular limits of automorphism sequences.
//!
//! A sequence g_k of projective automorphisms of a properly convex domain can
//! degenerate: the normalized matrices converge to a singular limit whose
//! projectivized kernel K and range R are proper subspaces. This module
//! analyzes such limits against a fixed domain: where probe orbits accumulate,
//! whether K and R stay off the interior, which boundary face spans R, and how
//! the transformed domains g_k(D) behave in a fixed affine chart.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::face::FaceDescriptor;
use crate::domain::{ConvexDomain, Membership};
use crate::error::{GeometryError, Result};
use crate::projective::{
    apply_map, is_affine_shaped, kernel_and_range, limit_of_sequence, ProjectiveMap,
    ProjectivePoint, ProjectiveSubspace,
};
use crate::sample;

const CONVERGENCE_TOL: f64 = 1e-9;
const SUBSPACE_TOL: f64 = 1e-6;

/// Closed-form generator for a sequence of projective matrices, indexed from
/// k = 1. Serialized form tags the variant by `kind`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SequenceSpec {
    /// Affine diagonal maps g_k = diag(d_1^k, ..., d_n^k).
    DiagPowers { entries: Vec<f64> },
    /// Powers g_k = M^k of a fixed (n+1) x (n+1) matrix.
    MatrixPower { matrix: Vec<Vec<f64>> },
    /// A finite list of (n+1) x (n+1) matrices, used in order.
    ExplicitList { matrices: Vec<Vec<Vec<f64>>> },
}

fn to_square(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(GeometryError::Invalid(
            "sequence matrix must be square and nonempty".into(),
        ));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl SequenceSpec {
    /// Affine ambient dimension the maps act on.
    pub fn ambient_dim(&self) -> Result<usize> {
        match self {
            SequenceSpec::DiagPowers { entries } => {
                if entries.is_empty() {
                    return Err(GeometryError::Invalid("empty diagonal".into()));
                }
                Ok(entries.len())
            }
            SequenceSpec::MatrixPower { matrix } => Ok(to_square(matrix)?.nrows() - 1),
            SequenceSpec::ExplicitList { matrices } => {
                let first = matrices
                    .first()
                    .ok_or_else(|| GeometryError::Invalid("empty matrix list".into()))?;
                Ok(to_square(first)?.nrows() - 1)
            }
        }
    }

    /// Number of terms actually available within `steps`.
    pub fn len(&self, steps: usize) -> usize {
        match self {
            SequenceSpec::ExplicitList { matrices } => steps.min(matrices.len()),
            _ => steps,
        }
    }

    /// Homogeneous matrices for k = 1..=steps. Matrix powers are rescaled as
    /// they accumulate so large exponents stay finite.
    pub fn matrices(&self, steps: usize) -> Result<Vec<DMatrix<f64>>> {
        let mut out = Vec::with_capacity(self.len(steps));
        match self {
            SequenceSpec::DiagPowers { entries } => {
                let n = self.ambient_dim()?;
                if entries.iter().any(|d| *d <= 0.0 || !d.is_finite()) {
                    return Err(GeometryError::Invalid(
                        "diagonal entries must be positive and finite".into(),
                    ));
                }
                for k in 1..=steps {
                    let mut m = DMatrix::identity(n + 1, n + 1);
                    for (i, d) in entries.iter().enumerate() {
                        m[(i, i)] = d.powi(k as i32);
                    }
                    out.push(m);
                }
            }
            SequenceSpec::MatrixPower { matrix } => {
                let base = to_square(matrix)?;
                let mut acc = base.clone();
                for _ in 1..=steps {
                    out.push(acc.clone());
                    acc *= &base;
                    let scale = acc.amax();
                    if scale == 0.0 || !scale.is_finite() {
                        return Err(GeometryError::Invalid(
                            "matrix powers degenerate to zero or overflow".into(),
                        ));
                    }
                    acc /= scale;
                }
            }
            SequenceSpec::ExplicitList { matrices } => {
                for rows in matrices.iter().take(steps) {
                    out.push(to_square(rows)?);
                }
            }
        }
        Ok(out)
    }

    /// The k-th map (k >= 1) as a projective map.
    pub fn map_at(&self, k: usize) -> Result<ProjectiveMap> {
        if k == 0 {
            return Err(GeometryError::Invalid("sequence index starts at 1".into()));
        }
        let ms = self.matrices(k)?;
        let m = ms
            .last()
            .ok_or_else(|| GeometryError::Invalid("sequence exhausted".into()))?;
        ProjectiveMap::new(m.clone())
    }
}

/// One probe orbit: the images g_k(x) with projective (chordal) distance to
/// the orbit's limit point, when the limit map is defined at x.
#[derive(Debug, Clone)]
pub struct ProbeTrace {
    pub start: Vec<f64>,
    pub limit_point: Option<ProjectivePoint>,
    pub track: Vec<TraceStep>,
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub step: usize,
    pub point: ProjectivePoint,
    pub dist_to_limit: f64,
}

/// Outcome of [`analyze_limit`].
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub limit_map: ProjectiveMap,
    pub converged: bool,
    pub last_delta: f64,
    pub kernel: ProjectiveSubspace,
    pub range: ProjectiveSubspace,
    pub kernel_meets_interior: bool,
    pub range_meets_interior: bool,
    /// Boundary face at an orbit accumulation point, when one is found in the
    /// affine chart.
    pub range_face: Option<FaceDescriptor>,
    /// Whether the span of that face equals R.
    pub range_face_span_ok: Option<bool>,
    /// Supporting-subspace check: every sampled boundary point lying on R has
    /// its face contained in R. None when no sampled point touches R.
    pub range_support_ok: Option<bool>,
    pub orbit_trace: Vec<ProbeTrace>,
}

/// Interior samples of moderate size: hit-and-run on unbounded domains can
/// wander to huge coordinates, which lose all precision once the sequence
/// maps scale them further.
fn moderate_samples<R: Rng>(
    d: &ConvexDomain,
    rng: &mut R,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = sample::interior_samples(d, rng, 6 * count)?
        .into_iter()
        .filter(|x| x.iter().all(|v| v.abs() <= 50.0))
        .take(count)
        .collect();
    if out.is_empty() {
        out.push(d.witness());
    }
    Ok(out)
}

fn chordal(p: &ProjectivePoint, q: &ProjectivePoint) -> f64 {
    let a = p.coords() / p.coords().norm();
    let b = q.coords() / q.coords().norm();
    (&a - &b).norm().min((a + b).norm())
}

/// Whether the affine part of a projective subspace meets the interior of
/// `d`, tested on `probes` sampled points of the subspace.
fn subspace_meets_interior<R: Rng>(
    d: &ConvexDomain,
    s: &ProjectiveSubspace,
    probes: usize,
    rng: &mut R,
) -> Result<bool> {
    let basis = s.basis();
    if basis.is_empty() {
        return Ok(false);
    }
    let n = d.ambient_dim();
    let m = basis.len();
    let b = DMatrix::from_columns(basis);
    // Affine points of the span are B c with (B c)_n = 1; if the last row of
    // B vanishes the subspace lies at infinity.
    let last = b.row(n).clone_owned();
    let r2 = last.dot(&last);
    if r2 <= 1e-18 {
        return Ok(false);
    }
    let c0 = last.transpose() / r2;
    // Orthonormal basis of the coefficient directions fixing the last
    // homogeneous coordinate: the nullspace of the last row.
    let unit = last.transpose() / r2.sqrt();
    let mut dirs: Vec<DVector<f64>> = Vec::new();
    for i in 0..m {
        let mut e = DVector::zeros(m);
        e[i] = 1.0;
        e -= &unit * unit.dot(&e);
        for dir in &dirs {
            let proj = dir.dot(&e);
            e -= dir * proj;
        }
        let nrm = e.norm();
        if nrm > 1e-8 {
            dirs.push(e / nrm);
        }
    }
    let radii = [0.25, 1.0, 4.0, 16.0, 64.0];
    let probe_ok = |c: &DVector<f64>| -> Result<bool> {
        let v = &b * c;
        if v[n].abs() <= 1e-12 {
            return Ok(false);
        }
        let aff: Vec<f64> = (0..n).map(|i| v[i] / v[n]).collect();
        if aff.iter().any(|x| !x.is_finite()) {
            return Ok(false);
        }
        Ok(d.contains(&aff)? == Membership::Interior)
    };
    if probe_ok(&c0)? {
        return Ok(true);
    }
    for i in 0..probes {
        let mut c = c0.clone();
        let scale = radii[i % radii.len()];
        for dir in &dirs {
            let t: f64 = rng.gen_range(-1.0..1.0);
            c += dir * (t * scale);
        }
        if probe_ok(&c)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn spans_equal(a: &ProjectiveSubspace, b: &ProjectiveSubspace, tol: f64) -> bool {
    a.dim() == b.dim() && a.subspace_of(b, tol) && b.subspace_of(a, tol)
}

/// Run the singular-limit analysis of `seq` against `d`.
///
/// Every map in the sequence is first checked to preserve `d` on sampled
/// interior points; a violation is reported as a preservation failure with a
/// witness. The normalized matrix limit then yields K and R, which are probed
/// against the interior, and probe orbits are traced toward their
/// accumulation points on the boundary.
pub fn analyze_limit(
    d: &ConvexDomain,
    seq: &SequenceSpec,
    steps: usize,
    probes: usize,
) -> Result<LimitReport> {
    let n = d.ambient_dim();
    if seq.ambient_dim()? != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: seq.ambient_dim()?,
        });
    }
    if steps < 2 {
        return Err(GeometryError::Invalid("need at least two steps".into()));
    }
    let mut rng = sample::rng(0x11a);
    let check_pts = moderate_samples(d, &mut rng, 20)?;
    let matrices = seq.matrices(steps)?;
    for (idx, m) in matrices.iter().enumerate() {
        for x in &check_pts {
            // Direct affine image: the relative infinity cutoff of projective
            // normalization would misread widely scaled finite images.
            let v = m * ProjectivePoint::from_affine(x).coords();
            let fail = if v[n] == 0.0 {
                true
            } else {
                let y: Vec<f64> = (0..n).map(|i| v[i] / v[n]).collect();
                if y.iter().any(|t| !t.is_finite()) {
                    true
                } else {
                    d.contains(&y)? == Membership::Outside
                }
            };
            if fail {
                return Err(GeometryError::PreservationFailure {
                    index: idx + 1,
                    witness: x.clone(),
                });
            }
        }
    }

    let outcome = limit_of_sequence(matrices.iter().cloned(), steps, CONVERGENCE_TOL)?;
    let (kernel, range) = kernel_and_range(&outcome.map);
    let kernel_meets_interior = subspace_meets_interior(d, &kernel, probes, &mut rng)?;
    let range_meets_interior = subspace_meets_interior(d, &range, probes, &mut rng)?;

    let trace_starts = moderate_samples(d, &mut rng, 5.min(probes.max(1)))?;
    let mut orbit_trace = Vec::new();
    for start in trace_starts {
        let p0 = ProjectivePoint::from_affine(&start);
        let limit_point = if kernel.contains(&p0, 1e-9) {
            None
        } else {
            apply_map(&outcome.map, &p0).ok()
        };
        let mut track = Vec::new();
        for (idx, m) in matrices.iter().enumerate() {
            let g = ProjectiveMap::new(m.clone())?;
            let point = apply_map(&g, &p0)?;
            let dist_to_limit = limit_point
                .as_ref()
                .map(|lp| chordal(&point, lp))
                .unwrap_or(f64::NAN);
            track.push(TraceStep {
                step: idx + 1,
                point,
                dist_to_limit,
            });
        }
        orbit_trace.push(ProbeTrace {
            start,
            limit_point,
            track,
        });
    }

    // Face at the accumulation point: the first probe limit that lands on the
    // boundary in the affine chart supplies a face whose span is compared to
    // R.
    let mut range_face = None;
    let mut range_face_span_ok = None;
    if outcome.converged && outcome.map.is_singular() {
        for tr in &orbit_trace {
            let Some(lp) = &tr.limit_point else { continue };
            let Some(aff) = lp.to_affine() else { continue };
            if d.contains(&aff)? != Membership::Boundary {
                continue;
            }
            match d.face_of(&aff) {
                Ok(face) => {
                    range_face_span_ok = Some(spans_equal(&face.support, &range, SUBSPACE_TOL));
                    range_face = Some(face);
                    break;
                }
                Err(GeometryError::Unsupported(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    let mut range_support_ok = None;
    if outcome.converged && outcome.map.is_singular() && !range.basis().is_empty() {
        let boundary = sample::boundary_samples(d, &mut rng, 60)?;
        for x in &boundary {
            let p = ProjectivePoint::from_affine(x);
            if range.residual(&p) > 1e-7 {
                continue;
            }
            match d.face_of(x) {
                Ok(face) => {
                    let ok = face.support.subspace_of(&range, SUBSPACE_TOL);
                    range_support_ok = Some(range_support_ok.unwrap_or(true) && ok);
                }
                Err(GeometryError::Unsupported(_)) | Err(GeometryError::NotBoundary) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    Ok(LimitReport {
        limit_map: outcome.map,
        converged: outcome.converged,
        last_delta: outcome.last_delta,
        kernel,
        range,
        kernel_meets_interior,
        range_meets_interior,
        range_face,
        range_face_span_ok,
        range_support_ok,
        orbit_trace,
    })
}

/// Verdict of the affine kernel check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelVerdict {
    /// Singular limit whose range meets the affine chart; the kernel lies at
    /// infinity as required.
    Holds,
    /// The hypothesis is empty: the limit is nonsingular, did not converge,
    /// or its range stays at infinity.
    Vacuous,
    /// Singular limit with range in the chart but kernel not at infinity.
    Fails,
}

impl std::fmt::Display for KernelVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            KernelVerdict::Holds => "holds",
            KernelVerdict::Vacuous => "vacuous",
            KernelVerdict::Fails => "fails",
        };
        f.write_str(s)
    }
}

fn at_infinity(s: &ProjectiveSubspace) -> bool {
    s.basis().iter().all(|v| {
        let n = v.len() - 1;
        v[n].abs() <= 1e-7 * v.norm()
    })
}

/// For a sequence of affine maps with singular limit g: if the range R(g)
/// meets the affine chart, the kernel K(g) must lie in the hyperplane at
/// infinity. Reports `holds`, `fails`, or `vacuous` when the hypothesis does
/// not apply; non-affine maps are rejected.
pub fn affine_kernel_check(seq: &SequenceSpec, steps: usize) -> Result<KernelVerdict> {
    let matrices = seq.matrices(steps)?;
    if matrices.len() < 2 {
        return Err(GeometryError::Invalid("need at least two steps".into()));
    }
    for m in &matrices {
        let g = ProjectiveMap::new(m.clone())?;
        if !is_affine_shaped(&g, 1e-9) {
            return Err(GeometryError::Invalid(
                "sequence contains a non-affine map".into(),
            ));
        }
    }
    let outcome = limit_of_sequence(matrices.into_iter(), steps, CONVERGENCE_TOL)?;
    if !outcome.converged || !outcome.map.is_singular() {
        return Ok(KernelVerdict::Vacuous);
    }
    let (kernel, range) = kernel_and_range(&outcome.map);
    if at_infinity(&range) {
        return Ok(KernelVerdict::Vacuous);
    }
    Ok(if at_infinity(&kernel) {
        KernelVerdict::Holds
    } else {
        KernelVerdict::Fails
    })
}

/// Axis-aligned sampling window for rasterized domain limits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartSpec {
    pub center: Vec<f64>,
    pub half_width: f64,
    pub resolution: usize,
}

impl ChartSpec {
    /// Default window: 512 cells per axis in dimension 2, 64 in dimension 3.
    pub fn default_for(n: usize, center: Vec<f64>, half_width: f64) -> Result<ChartSpec> {
        let resolution = match n {
            2 => 512,
            3 => 64,
            _ => {
                return Err(GeometryError::Unsupported(
                    "rasterized limits need ambient dimension 2 or 3".into(),
                ))
            }
        };
        Ok(ChartSpec {
            center,
            half_width,
            resolution,
        })
    }
}

/// Occupancy grid of a domain intersected with a chart window.
#[derive(Debug, Clone)]
pub struct Raster {
    pub dims: Vec<usize>,
    pub occupied: Vec<bool>,
    pub origin: Vec<f64>,
    pub cell: f64,
}

impl Raster {
    fn index(&self, idx: &[usize]) -> usize {
        let mut lin = 0;
        for (i, d) in idx.iter().zip(&self.dims) {
            lin = lin * d + i;
        }
        lin
    }

    pub fn count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    /// A raster is degenerate when no occupied cell is surrounded by occupied
    /// axis neighbors, i.e. the estimate has empty interior at this
    /// resolution.
    pub fn degenerate(&self) -> bool {
        let n = self.dims.len();
        let mut idx = vec![0usize; n];
        loop {
            let lin = self.index(&idx);
            if self.occupied[lin] {
                let mut interior = true;
                'axes: for a in 0..n {
                    for delta in [-1isize, 1] {
                        let i = idx[a] as isize + delta;
                        if i < 0 || i as usize >= self.dims[a] {
                            interior = false;
                            break 'axes;
                        }
                        let mut nb = idx.clone();
                        nb[a] = i as usize;
                        if !self.occupied[self.index(&nb)] {
                            interior = false;
                            break 'axes;
                        }
                    }
                }
                if interior {
                    return false;
                }
            }
            // odometer increment
            let mut a = n;
            loop {
                if a == 0 {
                    return true;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < self.dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
    }
}

/// One-dimensional squared distance transform (lower envelope of parabolas).
fn dt1d(f: &mut [f64]) {
    const INF: f64 = 1e18;
    let n = f.len();
    if n == 0 {
        return;
    }
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = -INF;
    z[1] = INF;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2 * (q - p)) as f64;
            if s <= z[k] {
                if k == 0 {
                    v[0] = q;
                    z[1] = INF;
                    break;
                }
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = INF;
                break;
            }
        }
    }
    let mut out = vec![0.0f64; n];
    let mut k = 0usize;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        out[q] = dq * dq + f[p];
    }
    f.copy_from_slice(&out);
}

/// Squared Euclidean distance (in cell units) to the nearest occupied cell.
fn edt_sq(r: &Raster) -> Vec<f64> {
    const INF: f64 = 1e18;
    let mut d: Vec<f64> = r
        .occupied
        .iter()
        .map(|&o| if o { 0.0 } else { INF })
        .collect();
    let n = r.dims.len();
    // Transform along each axis in turn; strides follow row-major layout.
    for axis in (0..n).rev() {
        let len = r.dims[axis];
        let stride: usize = r.dims[axis + 1..].iter().product();
        let outer: usize = r.dims[..axis].iter().product();
        let inner = stride;
        let mut line = vec![0.0f64; len];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * len * stride + i;
                for j in 0..len {
                    line[j] = d[base + j * stride];
                }
                dt1d(&mut line);
                for j in 0..len {
                    d[base + j * stride] = line[j];
                }
            }
        }
    }
    d
}

fn hausdorff(a: &Raster, b: &Raster) -> f64 {
    let da = edt_sq(a);
    let db = edt_sq(b);
    let mut worst: f64 = 0.0;
    for (i, &occ) in a.occupied.iter().enumerate() {
        if occ {
            worst = worst.max(db[i]);
        }
    }
    for (i, &occ) in b.occupied.iter().enumerate() {
        if occ {
            worst = worst.max(da[i]);
        }
    }
    worst.sqrt() * a.cell
}

/// Outcome of [`domain_sequence_limit`].
#[derive(Debug, Clone)]
pub struct DomainLimitReport {
    /// Raster of the last retained g_k(D) within the chart.
    pub estimate: Raster,
    /// (step, Hausdorff distance to the previous retained raster), in chart
    /// units.
    pub hausdorff_trace: Vec<(usize, f64)>,
    /// Steps dropped because g_k was singular or g_k(D) left the chart.
    pub skipped: Vec<usize>,
    pub degenerate: bool,
    pub resolution: usize,
    pub cell_size: f64,
}

fn rasterize(d: &ConvexDomain, inv: &ProjectiveMap, chart: &ChartSpec) -> Result<Raster> {
    let n = d.ambient_dim();
    let res = chart.resolution;
    let cell = 2.0 * chart.half_width / res as f64;
    let origin: Vec<f64> = chart
        .center
        .iter()
        .map(|c| c - chart.half_width)
        .collect();
    let mut raster = Raster {
        dims: vec![res; n],
        occupied: vec![false; res.pow(n as u32)],
        origin: origin.clone(),
        cell,
    };
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0f64; n];
    loop {
        for a in 0..n {
            x[a] = origin[a] + (idx[a] as f64 + 0.5) * cell;
        }
        let pre = apply_map(inv, &ProjectivePoint::from_affine(&x))?;
        let inside = match pre.to_affine() {
            Some(y) => d.contains(&y)? != Membership::Outside,
            None => false,
        };
        if inside {
            let lin = raster.index(&idx);
            raster.occupied[lin] = true;
        }
        let mut a = n;
        loop {
            if a == 0 {
                return Ok(raster);
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < raster.dims[a] {
                break;
            }
            idx[a] = 0;
        }
    }
}

/// Rasterize the images g_k(D) in `chart` and trace the Hausdorff distance
/// between consecutive retained steps. Step 0 is the domain itself; it must
/// meet the chart. Singular steps and steps whose image misses the chart are
/// skipped and recorded.
pub fn domain_sequence_limit(
    d: &ConvexDomain,
    seq: &SequenceSpec,
    steps: usize,
    chart: &ChartSpec,
) -> Result<DomainLimitReport> {
    let n = d.ambient_dim();
    if !(2..=3).contains(&n) {
        return Err(GeometryError::Unsupported(
            "rasterized limits need ambient dimension 2 or 3".into(),
        ));
    }
    if seq.ambient_dim()? != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: seq.ambient_dim()?,
        });
    }
    if chart.center.len() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: chart.center.len(),
        });
    }
    if chart.resolution < 2 || chart.half_width <= 0.0 {
        return Err(GeometryError::Invalid("degenerate chart".into()));
    }

    let base = rasterize(d, &ProjectiveMap::identity(n), chart)?;
    if base.count() == 0 {
        return Err(GeometryError::Invalid(
            "domain does not meet the chart".into(),
        ));
    }
    let mut prev = base;
    let mut trace = Vec::new();
    let mut skipped = Vec::new();
    let matrices = seq.matrices(steps)?;
    for (i, m) in matrices.iter().enumerate() {
        let k = i + 1;
        let g = ProjectiveMap::new(m.clone())?;
        let inv = match g.inverse() {
            Ok(inv) => inv,
            Err(_) => {
                skipped.push(k);
                continue;
            }
        };
        let raster = rasterize(d, &inv, chart)?;
        if raster.count() == 0 {
            skipped.push(k);
            continue;
        }
        trace.push((k, hausdorff(&prev, &raster)));
        prev = raster;
    }
    let degenerate = prev.degenerate();
    Ok(DomainLimitReport {
        cell_size: prev.cell,
        resolution: chart.resolution,
        estimate: prev,
        hausdorff_trace: trace,
        skipped,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::hpoly::HPoly;
    use crate::rat::{rat_int, RatMat};

    fn parabola() -> ConvexDomain {
        ConvexDomain::Paraboloid { n: 2 }
    }

    fn quadrant() -> ConvexDomain {
        let a = RatMat::new(
            vec![
                vec![rat_int(-1), rat_int(0)],
                vec![rat_int(0), rat_int(-1)],
            ],
            2,
        );
        ConvexDomain::HPoly(HPoly::new(a, vec![rat_int(0), rat_int(0)]).unwrap())
    }

    fn simplex_cone() -> ConvexDomain {
        let a = RatMat::new(
            vec![
                vec![rat_int(-1), rat_int(0), rat_int(0)],
                vec![rat_int(0), rat_int(-1), rat_int(0)],
                vec![rat_int(0), rat_int(0), rat_int(-1)],
            ],
            3,
        );
        ConvexDomain::HPoly(HPoly::new(a, vec![rat_int(0); 3]).unwrap())
    }

    #[test]
    fn parabola_contraction_limit() {
        let seq = SequenceSpec::DiagPowers {
            entries: vec![0.5, 0.25],
        };
        let rep = analyze_limit(&parabola(), &seq, 40, 300).unwrap();
        assert!(rep.converged);
        assert!(rep.limit_map.is_singular());
        // R is the single boundary point at the origin, K the line at
        // infinity; neither meets the interior.
        assert_eq!(rep.range.dim(), 0);
        assert_eq!(rep.kernel.dim(), 1);
        assert!(!rep.range_meets_interior);
        assert!(!rep.kernel_meets_interior);
        let origin = ProjectivePoint::from_affine(&[0.0, 0.0]);
        assert!(rep.range.contains(&origin, 1e-9));
        assert!(at_infinity(&rep.kernel));
        let face = rep.range_face.as_ref().expect("orbit accumulates on a face");
        assert_eq!(face.dim, 0);
        assert_eq!(rep.range_face_span_ok, Some(true));
        for tr in &rep.orbit_trace {
            let last = tr.track.last().unwrap();
            assert!(last.dist_to_limit < 1e-8, "orbit should reach its limit");
        }
    }

    #[test]
    fn simplex_cone_diagonal_limit() {
        let e = std::f64::consts::E;
        let seq = SequenceSpec::DiagPowers {
            entries: vec![e, 1.0, 1.0 / e],
        };
        let rep = analyze_limit(&simplex_cone(), &seq, 60, 300).unwrap();
        assert!(rep.converged);
        assert!(rep.limit_map.is_singular());
        // R is a point at infinity, K the projective plane x = 0; both miss
        // the open cone.
        assert_eq!(rep.range.dim(), 0);
        assert_eq!(rep.kernel.dim(), 2);
        assert!(!rep.range_meets_interior);
        assert!(!rep.kernel_meets_interior);
    }

    #[test]
    fn identity_sequence_is_regular() {
        let seq = SequenceSpec::DiagPowers {
            entries: vec![1.0, 1.0],
        };
        let rep = analyze_limit(&parabola(), &seq, 10, 50).unwrap();
        assert!(rep.converged);
        assert!(!rep.limit_map.is_singular());
        assert!(rep.kernel.basis().is_empty());
        assert!(rep.range.basis().is_empty());
        assert!(rep.range_face.is_none());
    }

    #[test]
    fn expansion_breaks_preservation() {
        let seq = SequenceSpec::DiagPowers {
            entries: vec![2.0, 2.0],
        };
        let err = analyze_limit(&parabola(), &seq, 10, 50).unwrap_err();
        assert!(matches!(err, GeometryError::PreservationFailure { .. }));
    }

    #[test]
    fn kernel_check_translation_is_vacuous() {
        let seq = SequenceSpec::MatrixPower {
            matrix: vec![
                vec![1.0, 0.0, 1.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        };
        assert_eq!(affine_kernel_check(&seq, 60).unwrap(), KernelVerdict::Vacuous);
    }

    #[test]
    fn kernel_check_contraction_holds() {
        let seq = SequenceSpec::DiagPowers {
            entries: vec![0.5, 0.5],
        };
        assert_eq!(affine_kernel_check(&seq, 60).unwrap(), KernelVerdict::Holds);
    }

    #[test]
    fn kernel_check_identity_is_vacuous() {
        let seq = SequenceSpec::DiagPowers {
            entries: vec![1.0, 1.0],
        };
        assert_eq!(affine_kernel_check(&seq, 10).unwrap(), KernelVerdict::Vacuous);
    }

    #[test]
    fn kernel_check_rejects_non_affine() {
        let seq = SequenceSpec::MatrixPower {
            matrix: vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![1.0, 0.0, 1.0],
            ],
        };
        assert!(affine_kernel_check(&seq, 10).is_err());
    }

    #[test]
    fn invariant_domain_has_zero_trace() {
        let seq = SequenceSpec::DiagPowers {
            entries: vec![2.0, 0.5],
        };
        let chart = ChartSpec {
            center: vec![1.0, 1.0],
            half_width: 1.0,
            resolution: 32,
        };
        let rep = domain_sequence_limit(&quadrant(), &seq, 6, &chart).unwrap();
        assert!(rep.skipped.is_empty());
        assert_eq!(rep.hausdorff_trace.len(), 6);
        for (_, h) in &rep.hausdorff_trace {
            assert_eq!(*h, 0.0);
        }
        assert!(!rep.degenerate);
    }

    #[test]
    fn flattened_ball_degenerates() {
        let seq = SequenceSpec::DiagPowers {
            entries: vec![1.0, 0.5],
        };
        let chart = ChartSpec {
            center: vec![0.0, 0.0],
            half_width: 1.5,
            resolution: 64,
        };
        let rep = domain_sequence_limit(&ConvexDomain::Ball { n: 2 }, &seq, 5, &chart).unwrap();
        assert!(rep.skipped.is_empty());
        assert!(rep.degenerate, "flattened ellipse should lose interior");
        assert!(rep.estimate.count() > 0);
        // Later steps move less: the trace decreases toward the segment.
        let first = rep.hausdorff_trace.first().unwrap().1;
        let last = rep.hausdorff_trace.last().unwrap().1;
        assert!(last < first);
    }

    #[test]
    fn drifting_domain_leaves_chart() {
        let seq = SequenceSpec::MatrixPower {
            matrix: vec![
                vec![1.0, 0.0, 2.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        };
        let chart = ChartSpec {
            center: vec![0.0, 0.0],
            half_width: 1.5,
            resolution: 32,
        };
        let rep = domain_sequence_limit(&ConvexDomain::Ball { n: 2 }, &seq, 5, &chart).unwrap();
        assert!(rep.skipped.contains(&3));
        assert!(rep.skipped.contains(&5));
    }

    #[test]
    fn sequence_spec_round_trips_json() {
        let seq = SequenceSpec::DiagPowers {
            entries: vec![0.5, 0.25],
        };
        let text = serde_json::to_string(&seq).unwrap();
        assert!(text.contains("diag-powers"));
        let back: SequenceSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.ambient_dim().unwrap(), 2);
        let explicit: SequenceSpec = serde_json::from_str(
            r#"{"kind":"explicit-list","matrices":[[[1,0,0],[0,1,0],[0,0,1]]]}"#,
        )
        .unwrap();
        assert_eq!(explicit.len(10), 1);
    }

    #[test]
    fn matrix_power_matches_direct_powers() {
        let seq = SequenceSpec::MatrixPower {
            matrix: vec![
                vec![2.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        };
        let g3 = seq.map_at(3).unwrap();
        let expect = ProjectiveMap::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
            8.0, 1.0, 1.0,
        ])))
        .unwrap();
        assert!(g3.approx_eq(&expect, 1e-12));
    }
}
