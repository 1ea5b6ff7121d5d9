//! `cpg`: command-line access to the convex projective geometry toolkit.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cpg_core::catalog;
use cpg_core::classify::{classify, invariant_profile};
use cpg_core::cone::{asymptotic_cone, ConeRepr};
use cpg_core::domain::json::{domain_to_json, parse_domain};
use cpg_core::domain::{ConvexDomain, Membership};
use cpg_core::foliation::{verify_foliation, FoliationChart};
use cpg_core::hilbert::hilbert_distance_detailed;
use cpg_core::limits::{affine_kernel_check, analyze_limit, SequenceSpec};
use cpg_core::sample;

#[derive(Parser)]
#[command(
    name = "cpg",
    version,
    about = "Convex domains, Hilbert metric, asymptotic cones, and affine classification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Args)]
struct DomainArg {
    /// Domain description as a JSON file.
    #[arg(long, value_name = "FILE", conflicts_with = "catalog")]
    domain: Option<PathBuf>,
    /// Name of a built-in catalog domain.
    #[arg(long, value_name = "NAME")]
    catalog: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a domain up to affine equivalence.
    Classify {
        #[command(flatten)]
        dom: DomainArg,
        /// Include the normalization witness map in the output.
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Hilbert distance between two interior points.
    HilbertDist {
        #[command(flatten)]
        dom: DomainArg,
        /// First point, comma separated coordinates.
        #[arg(long)]
        p: String,
        /// Second point, comma separated coordinates.
        #[arg(long)]
        q: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Asymptotic (recession) cone summary.
    AsymptoticCone {
        #[command(flatten)]
        dom: DomainArg,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Flow a point along the asymptotic foliation.
    Flow {
        #[command(flatten)]
        dom: DomainArg,
        /// Start point, comma separated coordinates.
        #[arg(long)]
        x: String,
        /// Flow time.
        #[arg(long)]
        t: f64,
        /// Write the flow path as CSV.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Analyze a singular limit of an automorphism sequence.
    LimitAnalyze {
        #[command(flatten)]
        dom: DomainArg,
        /// Sequence generator: a JSON file, or inline JSON starting with '{'.
        #[arg(long)]
        sequence: String,
        #[arg(long, default_value_t = 60)]
        steps: usize,
        #[arg(long, default_value_t = 200)]
        probes: usize,
        /// Write the first probe orbit as CSV.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run a property suite: foliation, metric, cone, or classification.
    Verify {
        suite: String,
        #[command(flatten)]
        dom: DomainArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// List built-in domains, or dump one by name.
    Catalog {
        /// Dump the named entry including its domain JSON.
        #[arg(long)]
        name: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

enum AppError {
    /// Bad input: exit code 2.
    Validation(String),
    /// A property suite failed: exit code 3.
    Suite(String),
}

use AppError::{Suite, Validation};

type AppResult<T> = Result<T, AppError>;

fn validation<E: std::fmt::Display>(e: E) -> AppError {
    Validation(e.to_string())
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("CPG_NUM_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Suite(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_domain(dom: &DomainArg) -> AppResult<ConvexDomain> {
    match (&dom.domain, &dom.catalog) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Validation(format!("cannot read {}: {e}", path.display())))?;
            parse_domain(&text).map_err(validation)
        }
        (None, Some(name)) => catalog::lookup(name).map(|e| e.domain).ok_or_else(|| {
            Validation(format!(
                "unknown catalog name '{name}'; available: {}",
                catalog::names().join(", ")
            ))
        }),
        _ => Err(Validation(
            "provide exactly one of --domain FILE or --catalog NAME".into(),
        )),
    }
}

fn parse_point(text: &str, n: usize) -> AppResult<Vec<f64>> {
    let coords: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let coords =
        coords.map_err(|e| Validation(format!("cannot parse point '{text}': {e}")))?;
    if coords.len() != n {
        return Err(Validation(format!(
            "point '{text}' has {} coordinates, domain needs {n}",
            coords.len()
        )));
    }
    Ok(coords)
}

fn emit(value: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(value).expect("serializable")),
        Format::Table => {
            let mut rows = Vec::new();
            flatten("", value, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in rows {
                println!("{k:<width$}  {v}");
            }
        }
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            if items.iter().all(|v| !v.is_object() && !v.is_array()) {
                let body = items
                    .iter()
                    .map(render_scalar)
                    .collect::<Vec<_>>()
                    .join(", ");
                out.push((prefix.to_string(), format!("[{body}]")));
            } else {
                for (i, v) in items.iter().enumerate() {
                    flatten(&format!("{prefix}[{i}]"), v, out);
                }
            }
        }
        other => out.push((prefix.to_string(), render_scalar(other))),
    }
}

fn render_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn affine_map_json(m: &cpg_core::affine::AffineMap) -> Value {
    let linear: Vec<Vec<f64>> = m
        .linear
        .row_iter()
        .map(|r| r.iter().copied().collect())
        .collect();
    let translation: Vec<f64> = m.translation.iter().copied().collect();
    json!({ "linear": linear, "translation": translation })
}

fn run(cli: Cli) -> AppResult<()> {
    match cli.cmd {
        Cmd::Classify { dom, witness, format } => {
            let d = load_domain(&dom)?;
            let c = classify(&d).map_err(validation)?;
            let mut out = json!({
                "label": c.label.name(),
                "profile": {
                    "n": c.profile.n,
                    "lineality_dim": c.profile.k,
                    "proper_factor_dim": c.profile.proper_factor_dim,
                    "ac_dim": c.profile.ac_dim,
                    "is_cone": c.profile.is_cone,
                    "strictly_convex": c.profile.strictly_convex,
                    "properly_convex": c.profile.properly_convex,
                },
                "reason": c.reason,
            });
            if witness {
                out["witness"] = match &c.witness {
                    Some(w) => affine_map_json(w),
                    None => Value::Null,
                };
            }
            emit(&out, format);
            Ok(())
        }
        Cmd::HilbertDist { dom, p, q, format } => {
            let d = load_domain(&dom)?;
            let n = d.ambient_dim();
            let p = parse_point(&p, n)?;
            let q = parse_point(&q, n)?;
            let v = hilbert_distance_detailed(&d, &p, &q).map_err(validation)?;
            emit(&json!({ "distance": v.distance, "warning": v.warning }), format);
            Ok(())
        }
        Cmd::AsymptoticCone { dom, format } => {
            let d = load_domain(&dom)?;
            let cone = asymptotic_cone(&d).map_err(validation)?;
            let kind = match cone.repr() {
                ConeRepr::Poly { .. } => "polyhedral",
                ConeRepr::Rays { .. } => "finitely-generated",
                ConeRepr::Lorentz { .. } => "lorentz",
                ConeRepr::Product(_) => "product",
                ConeRepr::LinearImage { .. } => "linear-image",
                ConeRepr::OverDomain { .. } => "homogenization",
            };
            emit(
                &json!({
                    "ambient": cone.ambient_dim(),
                    "dim": cone.dim(),
                    "pointed": cone.pointed(),
                    "lineality_dim": cone.lineality_basis().len(),
                    "kind": kind,
                }),
                format,
            );
            Ok(())
        }
        Cmd::Flow { dom, x, t, trace, format } => {
            let d = load_domain(&dom)?;
            let n = d.ambient_dim();
            let x = parse_point(&x, n)?;
            let chart = FoliationChart::new(d).map_err(validation)?;
            let base = chart.base_point(&x).map_err(validation)?;
            let end = chart.flow(&x, t).map_err(validation)?;
            if let Some(path) = trace {
                let mut f = fs::File::create(&path)
                    .map_err(|e| Validation(format!("cannot write {}: {e}", path.display())))?;
                let mut header = String::from("t");
                for i in 0..n {
                    header.push_str(&format!(",x{}", i + 1));
                }
                writeln!(f, "{header}").map_err(validation)?;
                let steps = 32;
                for k in 0..=steps {
                    let tk = t * k as f64 / steps as f64;
                    let p = chart.flow(&x, tk).map_err(validation)?;
                    let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                    writeln!(f, "{tk},{}", row.join(",")).map_err(validation)?;
                }
            }
            emit(&json!({ "base_point": base, "point": end, "t": t }), format);
            Ok(())
        }
        Cmd::LimitAnalyze { dom, sequence, steps, probes, trace, format } => {
            let d = load_domain(&dom)?;
            let text = if sequence.trim_start().starts_with('{') {
                sequence
            } else {
                fs::read_to_string(&sequence)
                    .map_err(|e| Validation(format!("cannot read {sequence}: {e}")))?
            };
            let seq: SequenceSpec = serde_json::from_str(&text)
                .map_err(|e| Validation(format!("malformed sequence JSON: {e}")))?;
            let rep = analyze_limit(&d, &seq, steps, probes).map_err(validation)?;
            let kernel_verdict = affine_kernel_check(&seq, steps)
                .ok()
                .map(|v| v.to_string());
            if let Some(path) = trace {
                let mut f = fs::File::create(&path)
                    .map_err(|e| Validation(format!("cannot write {}: {e}", path.display())))?;
                writeln!(f, "step,dist_to_limit,coords").map_err(validation)?;
                if let Some(tr) = rep.orbit_trace.first() {
                    for s in &tr.track {
                        let coords: Vec<String> =
                            s.point.coords().iter().map(|v| v.to_string()).collect();
                        writeln!(f, "{},{},{}", s.step, s.dist_to_limit, coords.join(" "))
                            .map_err(validation)?;
                    }
                }
            }
            emit(
                &json!({
                    "converged": rep.converged,
                    "singular": rep.limit_map.is_singular(),
                    "last_delta": rep.last_delta,
                    "kernel_dim": rep.kernel.dim(),
                    "range_dim": rep.range.dim(),
                    "kernel_meets_interior": rep.kernel_meets_interior,
                    "range_meets_interior": rep.range_meets_interior,
                    "range_face_dim": rep.range_face.as_ref().map(|f| f.dim),
                    "range_face_span_matches": rep.range_face_span_ok,
                    "range_supporting": rep.range_support_ok,
                    "kernel_verdict": kernel_verdict,
                }),
                format,
            );
            Ok(())
        }
        Cmd::Verify { suite, dom, seed, samples, format } => {
            let d = load_domain(&dom)?;
            let (passed, details) = match suite.as_str() {
                "foliation" => suite_foliation(&d, seed, samples)?,
                "metric" => suite_metric(&d, seed, samples)?,
                "cone" => suite_cone(&d, seed, samples)?,
                "classification" => suite_classification(&d, seed, samples)?,
                other => {
                    return Err(Validation(format!(
                        "unknown suite '{other}'; available: foliation, metric, cone, classification"
                    )))
                }
            };
            let out = json!({
                "suite": suite,
                "seed": seed,
                "samples": samples,
                "passed": passed,
                "details": details,
            });
            emit(&out, format);
            if passed {
                Ok(())
            } else {
                Err(Suite(format!("suite '{suite}' failed")))
            }
        }
        Cmd::Catalog { name, format } => {
            match name {
                Some(name) => {
                    let entry = catalog::lookup(&name).ok_or_else(|| {
                        Validation(format!(
                            "unknown catalog name '{name}'; available: {}",
                            catalog::names().join(", ")
                        ))
                    })?;
                    let domain = domain_to_json(&entry.domain).map_err(validation)?;
                    emit(
                        &json!({
                            "name": entry.name,
                            "expected_class": entry.expected_class.name(),
                            "provenance": entry.provenance,
                            "quasi_homogeneous": entry.quasi_homogeneous,
                            "domain": domain,
                        }),
                        format,
                    );
                }
                None => {
                    let list: Vec<Value> = catalog::entries()
                        .iter()
                        .map(|e| {
                            json!({
                                "name": e.name,
                                "expected_class": e.expected_class.name(),
                                "provenance": e.provenance,
                                "quasi_homogeneous": e.quasi_homogeneous,
                            })
                        })
                        .collect();
                    emit(&Value::Array(list), format);
                }
            }
            Ok(())
        }
    }
}

fn suite_foliation(d: &ConvexDomain, seed: u64, samples: usize) -> AppResult<(bool, Value)> {
    let chart = FoliationChart::new(d.clone()).map_err(validation)?;
    let mut rng = sample::rng(seed);
    let rep = verify_foliation(&chart, samples, &mut rng).map_err(validation)?;
    let passed = !rep.flagged && rep.max_violation <= 1e-8;
    Ok((
        passed,
        json!({
            "max_violation": rep.max_violation,
            "flagged": rep.flagged,
            "notes": rep.notes,
        }),
    ))
}

fn suite_metric(d: &ConvexDomain, seed: u64, samples: usize) -> AppResult<(bool, Value)> {
    let mut rng = sample::rng(seed);
    let pts = sample::interior_samples(d, &mut rng, 3 * samples.max(1)).map_err(validation)?;
    let mut worst_symmetry: f64 = 0.0;
    let mut worst_triangle: f64 = 0.0;
    for tri in pts.chunks_exact(3).take(samples) {
        let (p, q, r) = (&tri[0], &tri[1], &tri[2]);
        let dist = |a: &[f64], b: &[f64]| {
            hilbert_distance_detailed(d, a, b)
                .map(|v| v.distance)
                .map_err(validation)
        };
        let dpq = dist(p, q)?;
        let dqp = dist(q, p)?;
        let dpr = dist(p, r)?;
        let dqr = dist(q, r)?;
        worst_symmetry = worst_symmetry.max((dpq - dqp).abs());
        worst_triangle = worst_triangle.max(dpr - dpq - dqr);
    }
    let passed = worst_symmetry <= 1e-12 && worst_triangle <= 1e-9;
    Ok((
        passed,
        json!({
            "worst_symmetry_gap": worst_symmetry,
            "worst_triangle_excess": worst_triangle,
        }),
    ))
}

fn suite_cone(d: &ConvexDomain, seed: u64, samples: usize) -> AppResult<(bool, Value)> {
    let cone = asymptotic_cone(d).map_err(validation)?;
    let mut rng = sample::rng(seed);
    let x0 = d.witness();
    let n = d.ambient_dim();
    let mut violations = 0usize;
    if cone.dim() > 0 {
        for _ in 0..samples {
            let u = cone.sample_element(&mut rng, 1.0);
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-9 {
                continue;
            }
            for t in [1.0, 100.0, 1e4] {
                let y: Vec<f64> = x0.iter().zip(&u).map(|(x, ui)| x + t * ui / norm).collect();
                if matches!(d.contains(&y), Ok(Membership::Outside)) {
                    violations += 1;
                }
            }
        }
    }
    let mut outside_checked = 0usize;
    let mut attempts = 0usize;
    while outside_checked < samples && attempts < 100 * samples.max(1) {
        attempts += 1;
        let u = sample::unit_vector(&mut rng, n);
        if cone.distance(&u) < 0.05 {
            continue;
        }
        outside_checked += 1;
        let exits = [1.0, 10.0, 100.0, 1e3, 1e4]
            .iter()
            .any(|t| {
                let y: Vec<f64> = x0.iter().zip(&u).map(|(x, ui)| x + t * ui).collect();
                matches!(d.contains(&y), Ok(Membership::Outside))
            });
        if !exits {
            violations += 1;
        }
    }
    let passed = violations == 0;
    Ok((
        passed,
        json!({
            "violations": violations,
            "outside_directions_checked": outside_checked,
            "cone_dim": cone.dim(),
        }),
    ))
}

fn suite_classification(d: &ConvexDomain, seed: u64, samples: usize) -> AppResult<(bool, Value)> {
    let baseline = classify(d).map_err(validation)?;
    let profile = invariant_profile(d).map_err(validation)?;
    let mut rng = sample::rng(seed);
    let reps = samples.clamp(1, 50);
    let mut mismatches = 0usize;
    for _ in 0..reps {
        let map = sample::random_affine_map(&mut rng, d.ambient_dim());
        let img = ConvexDomain::affine_image(map, d.clone()).map_err(validation)?;
        if classify(&img).map_err(validation)?.label != baseline.label {
            mismatches += 1;
        }
    }
    let passed = mismatches == 0;
    Ok((
        passed,
        json!({
            "label": baseline.label.name(),
            "conjugates": reps,
            "mismatches": mismatches,
            "ac_dim": profile.ac_dim,
        }),
    ))
}
