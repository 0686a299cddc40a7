//! Single-purpose subcommands. Each reads its graph and parameters from an
//! [`ExperimentConfig`], writes a CSV table and returns a short summary.

use std::fs;
use std::io::Write;
use std::path::Path;

use heatbound::antitree::{build_antitree, dimension, reduce, SphereFunction};
use heatbound::bounds::{
    anchored_bound, antitree2_bound, antitree_bound_combinatorial, antitree_bound_intrinsic,
    ratio_report, AnchoredGeometry, BoundParams, BoundValue, IntrinsicInput, RatioInput,
    TwoPointInput,
};
use heatbound::functionals::{
    degree_mean_profile, gamma_error, isoperimetric_balls, isoperimetric_bruteforce,
    isoperimetric_segments, volume_profile, Exponent, GammaParams, BRUTE_FORCE_CAP,
};
use heatbound::graph::write_graph;
use heatbound::heat::{geometric_grid, HeatKernel, Verdict};
use heatbound::{VertexId, VertexMetric, VertexSet, WeightedGraph};

use crate::config::{BoundChoice, ExperimentConfig, Shape};
use crate::report::{header_line, num, Table};
use crate::suites::{configured_graph, configured_metric};
use crate::AppError;

fn emit(table: &Table, out: Option<&Path>, seed: u64) -> Result<(), AppError> {
    match out {
        Some(path) => {
            let mut file = fs::File::create(path)?;
            writeln!(file, "# {}", header_line(seed))?;
            file.write_all(&table.body()?)?;
        }
        None => std::io::stdout().write_all(&table.body()?)?,
    }
    Ok(())
}

fn check_anchor(g: &WeightedGraph, anchor: VertexId) -> Result<(), AppError> {
    if anchor < g.vertex_count() {
        Ok(())
    } else {
        Err(AppError::Usage(format!(
            "anchor {anchor} outside a graph with {} vertices",
            g.vertex_count()
        )))
    }
}

/// Writes the generated line or anti-tree in the graph file format.
pub fn antitree(c: &ExperimentConfig, out: Option<&Path>) -> Result<String, AppError> {
    let s = SphereFunction::power(c.gamma)?;
    let g = match c.shape {
        Shape::Line => reduce(&s, c.levels)?.graph().clone(),
        Shape::Antitree => build_antitree(&s, c.levels)?.graph().clone(),
    };
    match out {
        Some(path) => write_graph(&g, fs::File::create(path)?)?,
        None => write_graph(&g, std::io::stdout().lock())?,
    }
    Ok(format!(
        "{} with {} vertices and {} edges, dimension {}",
        c.shape,
        g.vertex_count(),
        g.edge_count(),
        dimension(c.gamma)
    ))
}

/// Distances from the anchor, with the intrinsic check and jump size.
pub fn metric(c: &ExperimentConfig, out: Option<&Path>) -> Result<String, AppError> {
    let g = configured_graph(c)?;
    check_anchor(&g, c.anchor)?;
    let rho = configured_metric(&g, c)?;
    let mut table = Table::new("metric", &["vertex", "distance", "frontier"]);
    for (x, d) in rho.sorted_by_distance(c.anchor) {
        table.push(vec![x.to_string(), num(d), g.is_frontier(x).to_string()]);
    }
    emit(&table, out, c.seed)?;
    let report = rho.verify_intrinsic();
    Ok(format!(
        "jump_size={} intrinsic={} worst_slack={}",
        num(rho.jump_size()),
        report.passes(),
        num(report.worst().map_or(0.0, |(_, s)| s))
    ))
}

/// Kernel values `p_t(o, y)` for `y` the anchor and its neighbours, computed by
/// exhaustion.
pub fn kernel(c: &ExperimentConfig, out: Option<&Path>) -> Result<String, AppError> {
    let mut custom = c.clone();
    custom.suites = vec![crate::config::Suite::Custom];
    let report = crate::suites::run_suite(crate::config::Suite::Custom, &custom)?;
    let table = report
        .table("custom_kernel")
        .expect("custom suite writes its table");
    emit(table, out, c.seed)?;
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|k| !k.passed)
        .map(|k| k.name.as_str())
        .collect();
    Ok(format!(
        "domain_size={} failed_checks={}",
        report.measures.get("domain_size").copied().unwrap_or(0.0),
        if failed.is_empty() {
            "none".into()
        } else {
            failed.join("|")
        }
    ))
}

/// Volume and degree-mean profiles about the anchor, one row per radius at
/// which the ball changes.
pub fn geometry(c: &ExperimentConfig, out: Option<&Path>) -> Result<String, AppError> {
    let g = configured_graph(c)?;
    check_anchor(&g, c.anchor)?;
    let rho = configured_metric(&g, c)?;
    let p = Exponent::from_f64(c.p.0)?;
    let volume = volume_profile(&rho, c.anchor);
    let degree = degree_mean_profile(&rho, c.anchor, p)?;
    let mut table = Table::new("geometry", &["radius", "volume", "degree_mean"]);
    for (&r, &v) in volume.breaks().iter().zip(volume.values()) {
        table.push(vec![
            num(r),
            num(v),
            degree.eval(r).map_or_else(String::new, num),
        ]);
    }
    emit(&table, out, c.seed)?;
    Ok(format!("interior_radius={}", num(volume.end())))
}

/// Isoperimetric constant of the interior ball of `radius` about the anchor.
pub fn iso(c: &ExperimentConfig, radius: f64, out: Option<&Path>) -> Result<String, AppError> {
    let g = configured_graph(c)?;
    check_anchor(&g, c.anchor)?;
    let rho = configured_metric(&g, c)?;
    let n = c.n.unwrap_or(2.0 * dimension(c.gamma));
    let u = rho.interior_ball(c.anchor, radius)?.members;
    let mut table = Table::new("iso", &["method", "value", "set_size"]);
    let balls = isoperimetric_balls(&rho, c.anchor, &u, n)?;
    let mut results = vec![balls];
    if let Ok(seg) = isoperimetric_segments(&rho, &u, n) {
        results.push(seg);
    }
    if u.len() <= BRUTE_FORCE_CAP {
        results.push(isoperimetric_bruteforce(&rho, &u, n)?);
    }
    for r in &results {
        table.push(vec![
            r.method.label().into(),
            num(r.value),
            r.set.len().to_string(),
        ]);
    }
    emit(&table, out, c.seed)?;
    let best = results
        .iter()
        .map(|r| r.value)
        .fold(f64::INFINITY, f64::min);
    Ok(format!(
        "n={} ball_vertices={} h={}",
        num(n),
        u.len(),
        num(best)
    ))
}

/// Ratios `p_t(x, y) / bound(t, x, y)` for the configured formula over the
/// `pairs` vertices closest to the anchor. The kernel is the Dirichlet kernel
/// of the graph minus its frontier.
pub fn bounds(c: &ExperimentConfig, pairs: usize, out: Option<&Path>) -> Result<String, AppError> {
    let g = configured_graph(c)?;
    check_anchor(&g, c.anchor)?;
    let rho = configured_metric(&g, c)?;
    let combinatorial = VertexMetric::combinatorial(&g)?;
    let domain = VertexSet::from_vertices(
        g.vertex_count(),
        (0..g.vertex_count()).filter(|&v| !g.is_frontier(v)),
    );
    if !domain.contains(c.anchor) {
        return Err(AppError::Usage("anchor lies on the frontier".into()));
    }
    let verdict = if g.has_frontier() {
        Verdict::Truncated
    } else {
        Verdict::Exact
    };
    let kernel = HeatKernel::on_domain(&g, &domain)?;
    let o = c.anchor;
    let points: Vec<VertexId> = rho
        .sorted_by_distance(o)
        .into_iter()
        .map(|(x, _)| x)
        .filter(|&x| domain.contains(x))
        .take(pairs.max(1))
        .collect();
    let d = c.d.unwrap_or_else(|| dimension(c.gamma));
    let n = c.n.unwrap_or(2.0 * d);
    let p = Exponent::from_f64(c.p.0)?;
    let jump = rho.jump_size();
    let mut params = BoundParams::new(n, d, p, jump, 1.0, 4.0)?;
    params.r1 = params.radius_threshold() / 4.0;
    params.r2 = 4.0 * params.r1;
    let gamma_params = GammaParams::new(n, c.beta.unwrap_or_else(|| params.beta()), jump, p)?;
    let dist = rho.distances_from(o);
    let hops = combinatorial.distances_from(o);
    let profiles: Vec<_> = points.iter().map(|&x| volume_profile(&rho, x)).collect();
    let times = geometric_grid(c.t_grid.start, c.t_grid.end, c.t_grid.ratio)?;

    let mut inputs = Vec::new();
    let mut skipped = 0usize;
    for &t in &times {
        let root_volume = profiles[0].eval(t.sqrt());
        for (i, &x) in points.iter().enumerate() {
            for (j, &y) in points.iter().enumerate() {
                let shape: Option<BoundValue> = match c.bound {
                    BoundChoice::Antitree1 => root_volume
                        .map(|volume| {
                            antitree_bound_intrinsic(
                                &IntrinsicInput {
                                    gamma: c.gamma,
                                    n,
                                    exponent: None,
                                    rho_ox: dist[x],
                                    rho_oy: dist[y],
                                    rho_xy: rho.distance(x, y),
                                    volume,
                                    pair_admissible: true,
                                },
                                t,
                                1.0,
                            )
                        })
                        .transpose()?,
                    BoundChoice::Antitree1c => Some(antitree_bound_combinatorial(
                        c.gamma,
                        hops[x] as u64,
                        hops[y] as u64,
                        t,
                        1.0,
                        None,
                    )?),
                    BoundChoice::Antitree2 => {
                        match (profiles[i].eval(t.sqrt()), profiles[j].eval(t.sqrt())) {
                            (Some(vx), Some(vy)) => Some(antitree2_bound(
                                &TwoPointInput {
                                    gamma: c.gamma,
                                    n,
                                    rho_ox: dist[x],
                                    rho_oy: dist[y],
                                    rho_xy: rho.distance(x, y),
                                    volume_x: vx,
                                    volume_y: vy,
                                },
                                t,
                                1.0,
                            )?),
                            _ => None,
                        }
                    }
                    BoundChoice::Main => {
                        let volume = profiles[0].eval(params.volume_radius(t));
                        let gx = gamma_error(
                            &rho,
                            o,
                            params.anchor_radius(t, dist[x]),
                            p,
                            &gamma_params,
                        );
                        let gy = gamma_error(
                            &rho,
                            o,
                            params.anchor_radius(t, dist[y]),
                            p,
                            &gamma_params,
                        );
                        match (volume, gx, gy) {
                            (Some(volume), Ok(gamma_x), Ok(gamma_y)) => Some(anchored_bound(
                                &params,
                                &AnchoredGeometry {
                                    gamma_x,
                                    gamma_y,
                                    rho_ox: dist[x],
                                    rho_oy: dist[y],
                                    rho_xy: rho.distance(x, y),
                                    volume,
                                },
                                t,
                            )?),
                            _ => None,
                        }
                    }
                };
                match shape {
                    Some(shape) => inputs.push(RatioInput {
                        t,
                        x,
                        y,
                        kernel: Some(kernel.value(t, x, y)?),
                        shape,
                    }),
                    None => skipped += 1,
                }
            }
        }
    }
    let report = ratio_report(inputs);
    let mut table = Table::new(
        "bounds",
        &[
            "t",
            "x",
            "y",
            "p",
            "bound_shape",
            "ratio",
            "flags",
            "domain_size",
            "verdict",
        ],
    );
    for row in &report.rows {
        table.push(vec![
            num(row.t),
            row.x.to_string(),
            row.y.to_string(),
            num(row.kernel),
            num(row.shape),
            num(row.ratio),
            row.flags.clone(),
            domain.len().to_string(),
            verdict.label().into(),
        ]);
    }
    emit(&table, out, c.seed)?;
    Ok(format!(
        "formula={} sup={} time_stability={} growth={} flagged={} skipped={}",
        c.bound,
        num(report.sup),
        report.time_stability().map_or_else(|| "nan".into(), num),
        report.growth().map_or_else(|| "nan".into(), num),
        report.flagged,
        skipped
    ))
}
