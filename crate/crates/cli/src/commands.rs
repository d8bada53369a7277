use std::path::Path;

use normforge_core::approx::VertexOrigin;
use normforge_core::exposed::{GeometryCheck, Rejection};
use normforge_core::{
    build_approx_norm, choose_p, decompose_dnm, exposed_points, support_profile, verify_elements,
    verify_lemma_geometry, verify_sandwich, ApproxNorm, Error, Functional, LevelingDecomposition, NormSpec, SmoothNorm,
    Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::files::{read_json, read_spec, to_json, write_text, ApproxFile, FunctionalFile, SparseEntry};
use crate::report::{fmt_f64, Report, Table, EXPOSED_COLUMNS, SANDWICH_COLUMNS, SMOOTH_COLUMNS};
use crate::{core_error, vertex_config, CliError, Command};

/// Tolerance for the leveling identities.
pub const LEVEL_TOL: f64 = 1e-12;
/// Slack on the smooth-norm sandwich.
pub const SMOOTH_TOL: f64 = 1e-9;
/// Bound on the relative gap between analytic and finite-difference gradients.
pub const GRADIENT_TOL: f64 = 1e-5;
/// Step of the central differences, at unit-norm points.
pub const FD_STEP: f64 = 1e-5;
/// Bound on the relative Euler defect `|grad . x - N(x)| / N(x)`.
pub const EULER_TOL: f64 = 1e-9;

pub fn execute(command: &Command) -> Result<Report, CliError> {
    let report = match command {
        Command::Level { norm, functional, n } => level(norm, functional, *n)?,
        Command::Approximate {
            norm,
            epsilon,
            m_extra,
            out,
        } => approximate(norm, *epsilon, *m_extra, out)?,
        Command::Verify {
            norm,
            approx,
            epsilon,
            csv,
        } => verify(norm, approx, *epsilon, csv.as_deref())?,
        Command::Smooth {
            norm,
            epsilon,
            samples,
            seed,
            csv,
        } => smooth(norm, *epsilon, *samples, *seed, csv.as_deref())?,
        Command::Analyze { norm, csv } => analyze(norm, csv.as_deref())?,
    };
    Ok(report.finish())
}

fn path_value(path: &Path) -> Value {
    Value::from(path.display().to_string())
}

fn sparse(f: &Functional) -> Value {
    let e = SparseEntry::from_functional(f);
    json!({ "indices": e.indices, "values": e.values })
}

fn max_abs_diff(a: &Functional, b: &Functional) -> Result<f64, CliError> {
    let d = a.sub(b).map_err(|e| core_error("difference", e))?;
    Ok(d.max_abs_coeff())
}

fn level(norm: &Path, functional: &Path, only: Option<usize>) -> Result<Report, CliError> {
    let spec = read_spec(norm, vertex_config()?)?;
    let file: FunctionalFile = read_json(functional)?;
    let f = file.to_functional()?;
    if f.dim() != spec.dim() {
        return Err(CliError::Parse(format!(
            "functional has dim {} but the norm has dim {}",
            f.dim(),
            spec.dim()
        )));
    }
    let levels = LevelingDecomposition::new(&f).map_err(|e| core_error("functional", e))?;
    let depth = levels.depth();
    let ns: Vec<usize> = match only {
        Some(n) if (1..=depth).contains(&n) => vec![n],
        Some(n) => return Err(CliError::Usage(format!("--n must lie in 1..={depth}, got {n}"))),
        None => (1..=depth).collect(),
    };
    let ce = |e: Error| core_error("leveling", e);

    let mut report = Report::new("level");
    report.input("norm", path_value(norm));
    report.input("functional", path_value(functional));
    report.input("n", only);

    let mut h_rows = Vec::new();
    let mut j_rows = Vec::new();
    let mut lambda_rows = Vec::new();
    for &n in &ns {
        let h = levels.h(n).map_err(ce)?;
        let residual = levels.residual_l1(n).map_err(ce)?;
        let mut domination = f64::INFINITY;
        for i in f.support() {
            domination = domination.min(f.coeff(i).abs() - h.coeff(i).abs());
        }
        report.check(format!("h_domination[{n}]"), domination);
        let telescoped: f64 = (1..=n)
            .map(|i| Ok((levels.p(i) - levels.p(i + 1)) * levels.g_set(i)?.len() as f64))
            .sum::<Result<f64, Error>>()
            .map_err(ce)?;
        report.check(
            format!("h_l1_identity[{n}]"),
            LEVEL_TOL - (h.l1_norm() - telescoped).abs(),
        );
        let dual_distance = spec.dual_norm(&f.sub(&h).map_err(ce)?).map_err(ce)?;
        h_rows.push(json!({
            "n": n,
            "level": levels.p(n),
            "h": sparse(&h),
            "residual_l1": residual,
            "dual_distance": dual_distance,
        }));

        if n < depth {
            for m in n + 1..=depth {
                let j = levels.j(n, m).map_err(ce)?;
                let diff = f.sub(&j).map_err(ce)?;
                let l1 = diff.l1_norm();
                report.check(format!("j_l1_bound[{n},{m}]"), 2.0 * residual + LEVEL_TOL - l1);
                j_rows.push(json!({
                    "n": n,
                    "m": m,
                    "j": sparse(&j),
                    "l1_distance": l1,
                    "dual_distance": spec.dual_norm(&diff).map_err(ce)?,
                }));
            }
            let weights = levels.lambda_weights(n).map_err(ce)?;
            let total: f64 = weights.iter().map(|(_, w)| w).sum();
            report.check(format!("lambda_sum[{n}]"), LEVEL_TOL - (total - 1.0).abs());
            let rebuilt = levels.convex_reconstruct(n).map_err(ce)?;
            report.check(format!("reconstruct[{n}]"), LEVEL_TOL - max_abs_diff(&f, &rebuilt)?);
            lambda_rows.push(json!({
                "n": n,
                "weights": weights.iter().map(|(m, w)| json!({ "m": m, "lambda": w })).collect::<Vec<_>>(),
            }));
        }
    }
    let top = levels.h(depth).map_err(ce)?;
    let top_diff = max_abs_diff(&f, &top)?;
    report.record("h_top_exact", top_diff == 0.0, 0.0 - top_diff);

    report.summary("depth", depth);
    report.summary("support", f.support_size());
    report.summary("l1_norm", f.l1_norm());
    report.summary("dual_norm", spec.dual_norm(&f).map_err(ce)?);
    report.details = json!({
        "levels": levels
            .levels()
            .iter()
            .enumerate()
            .map(|(i, l)| json!({ "index": i + 1, "value": l.value, "set": l.set }))
            .collect::<Vec<_>>(),
        "h": h_rows,
        "j": j_rows,
        "lambda": lambda_rows,
    });
    Ok(report)
}

fn approximate(norm: &Path, epsilon: f64, m_extra: usize, out: &Path) -> Result<Report, CliError> {
    let spec = read_spec(norm, vertex_config()?)?;
    let approx = build_approx_norm(&spec, epsilon, m_extra).map_err(|e| core_error("approximate", e))?;
    write_text(out, &to_json(&ApproxFile::from_approx(&approx)))?;

    let mut report = Report::new("approximate");
    report.input("norm", path_value(norm));
    report.input("epsilon", epsilon);
    report.input("m_extra", m_extra);
    report.input("out", path_value(out));
    element_records(&mut report, &approx)?;
    support_summary(&mut report, &approx)?;
    report.summary("elements", approx.elements().len());
    report.summary("induced_boundary", approx.induced().boundary().len());
    Ok(report)
}

fn element_records(report: &mut Report, approx: &ApproxNorm) -> Result<(), CliError> {
    for c in verify_elements(approx).map_err(|e| core_error("elements", e))? {
        let margin = (c.bound - c.distance).min(c.scaled_cap - c.scaled_dual);
        report.record(format!("element[{}]", c.index), c.pass, margin);
    }
    Ok(())
}

fn support_summary(report: &mut Report, approx: &ApproxNorm) -> Result<(), CliError> {
    let profile = support_profile(approx).map_err(|e| core_error("support", e))?;
    report.record(
        "support_within_level_set",
        profile.all_within(),
        if profile.all_within() { 0.0 } else { -1.0 },
    );
    report.summary("source_support_max", profile.source_max);
    report.summary("source_support_mean", profile.source_mean);
    report.summary("approx_support_max", profile.approx_max);
    report.summary("approx_support_mean", profile.approx_mean);
    Ok(())
}

fn verify(norm: &Path, approx_path: &Path, epsilon: f64, csv: Option<&Path>) -> Result<Report, CliError> {
    let spec = read_spec(norm, vertex_config()?)?;
    let file: ApproxFile = read_json(approx_path)?;
    let elements = file
        .elements_for(&spec)
        .map_err(|e| e.with_context(&approx_path.display().to_string()))?;
    let stored = file.boundary_functionals()?;

    let mut report = Report::new("verify");
    report.input("norm", path_value(norm));
    report.input("approx", path_value(approx_path));
    report.input("epsilon", epsilon);
    report.input("csv", csv.map(path_value));
    report.check("epsilon_matches", -(file.epsilon - epsilon).abs());

    let mut table = Table::new(&SANDWICH_COLUMNS);
    let approx = match ApproxNorm::from_parts(spec, epsilon, elements) {
        Ok(approx) => approx,
        Err(e @ (Error::CapExceeded { .. } | Error::InvalidParameter(_))) => return Err(core_error("verify", e)),
        Err(e) => {
            report.record("induced_norm_valid", false, -1.0);
            report.summary("error", e.to_string());
            if let Some(path) = csv {
                table.write(path)?;
            }
            return Ok(report);
        }
    };

    let rebuilt = approx.induced().boundary();
    let boundary_margin = if stored.len() != rebuilt.len() {
        -(stored.len().abs_diff(rebuilt.len()) as f64)
    } else {
        let mut worst = 0.0f64;
        for (a, b) in stored.iter().zip(rebuilt) {
            worst = worst.max(max_abs_diff(a, b)?);
        }
        -worst
    };
    report.record("induced_boundary_matches", boundary_margin == 0.0, boundary_margin);

    let sandwich = verify_sandwich(&approx).map_err(|e| core_error("sandwich", e))?;
    let mut counts = [0usize; 2];
    for (id, c) in sandwich.checks.iter().enumerate() {
        let (tag, slot) = match c.origin {
            VertexOrigin::Source => ("source", 0),
            VertexOrigin::Induced => ("induced", 1),
        };
        counts[slot] += 1;
        let margin = c.lower_margin.min(c.upper_margin).min(c.strict_margin);
        report.record(format!("sandwich[{tag}:{}]", counts[slot] - 1), c.pass, margin);
        table.push(vec![
            id.to_string(),
            fmt_f64(c.source_norm),
            fmt_f64(c.approx_norm),
            fmt_f64(c.ratio),
            fmt_f64(c.lower_margin),
            fmt_f64(c.upper_margin),
        ]);
    }
    element_records(&mut report, &approx)?;
    support_summary(&mut report, &approx)?;

    let (lo, hi) = sandwich.ratio_range();
    report.summary("ratio_min", lo);
    report.summary("ratio_max", hi);
    report.summary("source_vertices", counts[0]);
    report.summary("induced_vertices", counts[1]);
    report.summary("elements", approx.elements().len());
    if let Some(path) = csv {
        table.write(path)?;
    }
    Ok(report)
}

fn central_difference(norm: &SmoothNorm, x: &[f64]) -> Result<Vec<f64>, Error> {
    (0..x.len())
        .map(|i| {
            let mut plus = x.to_vec();
            let mut minus = x.to_vec();
            plus[i] += FD_STEP;
            minus[i] -= FD_STEP;
            Ok((norm.value(&Vector::new(plus)?)? - norm.value(&Vector::new(minus)?)?) / (2.0 * FD_STEP))
        })
        .collect()
}

fn smooth(norm: &Path, epsilon: f64, samples: usize, seed: u64, csv: Option<&Path>) -> Result<Report, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let spec = read_spec(norm, vertex_config()?)?;
    let ce = |e: Error| core_error("smooth", e);
    let p = choose_p(spec.boundary().len(), epsilon).map_err(ce)?;
    let smooth = SmoothNorm::new(spec.clone(), p).map_err(ce)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new(&SMOOTH_COLUMNS);
    let (mut lower, mut upper) = (f64::INFINITY, f64::INFINITY);
    let (mut ratio_min, mut ratio_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut grad_worst, mut euler_worst) = (0.0f64, 0.0f64);
    for id in 0..samples {
        let raw = loop {
            let v = Vector::new((0..spec.dim()).map(|_| rng.random_range(-1.0..1.0)).collect()).map_err(ce)?;
            if !v.is_zero() {
                break v;
            }
        };
        let x = raw.scaled(1.0 / spec.eval(&raw).map_err(ce)?);
        let base = spec.eval(&x).map_err(ce)?;
        let (value, grad) = smooth.value_and_gradient(&x).map_err(ce)?;
        let ratio = value / base;
        lower = lower.min(value - base + SMOOTH_TOL * base);
        upper = upper.min((1.0 + epsilon) * base + SMOOTH_TOL * base - value);
        ratio_min = ratio_min.min(ratio);
        ratio_max = ratio_max.max(ratio);

        let fd = central_difference(&smooth, x.coords()).map_err(ce)?;
        let gap = grad
            .coords()
            .iter()
            .zip(&fd)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let grad_rel_err = gap / grad.euclidean_norm();
        grad_worst = grad_worst.max(grad_rel_err);
        let euler: f64 = grad.coords().iter().zip(x.coords()).map(|(g, c)| g * c).sum();
        euler_worst = euler_worst.max((euler - value).abs() / value);

        table.push(vec![
            id.to_string(),
            fmt_f64(base),
            fmt_f64(value),
            fmt_f64(ratio),
            fmt_f64(grad_rel_err),
        ]);
    }

    let mut report = Report::new("smooth");
    report.input("norm", path_value(norm));
    report.input("epsilon", epsilon);
    report.input("samples", samples);
    report.input("seed", seed);
    report.input("csv", csv.map(path_value));
    report.check("lower_bound", lower);
    report.check("upper_bound", upper);
    report.check("gradient_fd", GRADIENT_TOL - grad_worst);
    report.check("euler_identity", EULER_TOL - euler_worst);
    report.summary("p", p);
    report.summary("k", spec.boundary().len());
    report.summary("ratio_min", ratio_min);
    report.summary("ratio_max", ratio_max);
    report.summary("grad_rel_err_max", grad_worst);
    report.summary("euler_rel_err_max", euler_worst);
    if let Some(path) = csv {
        table.write(path)?;
    }
    Ok(report)
}

fn check_name(prefix: &str, c: &GeometryCheck) -> String {
    match c.second {
        Some(j) => format!("{prefix}{}[{},{j}]", c.kind.name(), c.first),
        None => format!("{prefix}{}[{}]", c.kind.name(), c.first),
    }
}

fn analyze(norm: &Path, csv: Option<&Path>) -> Result<Report, CliError> {
    let spec: NormSpec = read_spec(norm, vertex_config()?)?;
    let ce = |e: Error| core_error("analyze", e);
    let analysis = exposed_points(&spec).map_err(ce)?;
    let lemma = verify_lemma_geometry(&analysis.points, &spec).map_err(ce)?;
    let dnm = decompose_dnm(&analysis.points, &spec).map_err(ce)?;

    let mut report = Report::new("analyze");
    report.input("norm", path_value(norm));
    report.input("csv", csv.map(path_value));
    let pairs = analysis.pair_count();
    report.check("exposed_pairs_bounded", spec.boundary().len() as f64 - pairs as f64);
    for c in &lemma.checks {
        report.record(check_name("", c), c.pass, c.margin);
    }
    for c in &dnm.report.checks {
        report.record(check_name("dnm_", c), c.pass, c.margin);
    }

    let mut table = Table::new(&EXPOSED_COLUMNS);
    let mut points = Vec::new();
    for (id, p) in analysis.points.iter().enumerate() {
        points.push(json!({
            "id": id,
            "f": sparse(&p.f),
            "source_index": p.source_index,
            "negated": p.negated,
            "witness": p.witness.coords(),
            "radius": p.radius,
            "n_f": p.n_f,
            "support_witness": p.support_witness.coords(),
            "support_radius": p.support_radius,
            "m_f": p.m_f,
            "class_witness": p.class_witness.coords(),
            "class_radius": p.class_radius,
        }));
        table.push(vec![
            id.to_string(),
            p.source_index.to_string(),
            u8::from(p.negated).to_string(),
            fmt_f64(p.radius),
            p.n_f.to_string(),
            p.m_f.to_string(),
            fmt_f64(p.class_radius),
            fmt_f64(p.support_radius),
        ]);
    }
    let rejected: Vec<Value> = analysis
        .rejected
        .iter()
        .map(|r| {
            json!({
                "f": sparse(&r.f),
                "source_index": r.source_index,
                "negated": r.negated,
                "reason": match r.reason {
                    Rejection::NotVertex => "not_a_dual_vertex",
                    Rejection::ZeroRadius => "zero_radius",
                },
            })
        })
        .collect();
    let classes: Vec<Value> = dnm
        .classes
        .iter()
        .map(|(&(n, m), members)| json!({ "n": n, "m": m, "points": members }))
        .collect();

    report.summary("exposed_points", analysis.points.len());
    report.summary("exposed_pairs", pairs);
    report.summary("rejected", analysis.rejected.len());
    report.summary("classes", dnm.classes.len());
    report.summary("basis", "standard");
    report.details = json!({ "points": points, "rejected": rejected, "classes": classes });
    if let Some(path) = csv {
        table.write(path)?;
    }
    Ok(report)
}
