//! Verification suites. Each suite runs a fixed experiment, records hard checks
//! (invariants that must hold) and findings (measured bands and constants), and
//! emits plot-ready tables.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;

use heatbound::antitree::{
    build_antitree, degree_band, dimension, distance_band, levels_for_radius, reduce, volume_band,
    AntiTree, ReducedLine, SphereFunction,
};
use heatbound::band::BandReport;
use heatbound::bounds::{
    anchored_bound, antitree2_bound, antitree_bound_combinatorial, antitree_bound_intrinsic,
    ratio_report, zeta, AnchoredGeometry, BoundParams, BoundValue, IntrinsicInput, RatioInput,
    RatioReport, TwoPointInput,
};
use heatbound::functionals::{
    decreasing_inequality_check, gamma_error, isoperimetric_balls, isoperimetric_bruteforce,
    isoperimetric_segments, sobolev_check, sobolev_def_check, volume_profile, Exponent,
    GammaParams, StepFunction, BRUTE_FORCE_CAP,
};
use heatbound::graph::{area_sides, coarea_sides, read_graph, PairWeights};
use heatbound::heat::{
    exhaustion_converge, geometric_grid, lambda_bottom, ExhaustionOptions, HeatKernel, Verdict,
    DEFAULT_GRID_RATIO,
};
use heatbound::suite::{radial_families, random_function, random_graph, random_supported, rng};
use heatbound::{VertexId, VertexMetric, VertexSet, WeightedGraph};

use crate::config::{ExperimentConfig, MetricChoice, Shape, Suite};
use crate::report::{num, SuiteReport, Table};
use crate::AppError;

type Outcome = Result<(), AppError>;
type Probes = Vec<(VertexId, VertexId)>;

pub fn run_suite(suite: Suite, config: &ExperimentConfig) -> Result<SuiteReport, AppError> {
    let start = Instant::now();
    let mut report = SuiteReport::new(suite);
    match suite {
        Suite::Identities => identities(&mut report, config)?,
        Suite::ClosedForm => closed_form(&mut report)?,
        Suite::Reduction => reduction(&mut report)?,
        Suite::MetricReduction => metric_reduction(&mut report)?,
        Suite::Intrinsic => intrinsic(&mut report, config)?,
        Suite::Semigroup => semigroup(&mut report, config)?,
        Suite::Decay => decay(&mut report)?,
        Suite::Bands => bands(&mut report)?,
        Suite::Isoperimetry => isoperimetry(&mut report)?,
        Suite::Sobolev => sobolev(&mut report, config)?,
        Suite::Zeta => zeta_suite(&mut report)?,
        Suite::Ratios => ratios(&mut report)?,
        Suite::Lambda => lambda(&mut report)?,
        Suite::Custom => custom(&mut report, config)?,
    }
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn two_vertices() -> WeightedGraph {
    WeightedGraph::new(vec![1.0, 1.0], [(0, 1, 1.0)]).expect("valid graph")
}

/// Every vertex except the truncation frontier.
fn interior_domain(g: &WeightedGraph) -> VertexSet {
    VertexSet::from_vertices(
        g.vertex_count(),
        (0..g.vertex_count()).filter(|&v| !g.is_frontier(v)),
    )
}

fn line_kernel(line: &ReducedLine) -> Result<HeatKernel, AppError> {
    Ok(HeatKernel::on_domain(
        line.graph(),
        &interior_domain(line.graph()),
    )?)
}

fn band_row(table: &mut Table, label: &[String], band: &BandReport) {
    let mut row = label.to_vec();
    row.extend([band.min, band.max, band.argmin, band.argmax, band.spread()].map(num));
    table.push(row);
}

fn identities(r: &mut SuiteReport, c: &ExperimentConfig) -> Outcome {
    let mut rng = rng(c.seed);
    let mut table = Table::new(
        "identities",
        &["graph", "function", "identity", "lhs", "rhs", "abs_error"],
    );
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    for gi in 0..10 {
        let size = rng.gen_range(2..=15);
        let g = random_graph(&mut rng, size, 0.3);
        for fi in 0..10 {
            let f = random_function(&mut rng, size, -1.0, 1.0);
            let h = random_function(&mut rng, size, -1.0, 1.0);
            let alpha = rng.gen_range(0.05..=1.0);
            let pos: Vec<f64> = f.iter().map(|v| v.abs()).collect();
            let mut record = |name: &'static str, lhs: f64, rhs: f64, err: f64| {
                let w = worst.entry(name).or_insert(0.0);
                *w = w.max(err);
                table.push(vec![
                    gi.to_string(),
                    fi.to_string(),
                    name.into(),
                    num(lhs),
                    num(rhs),
                    num(err),
                ]);
            };
            let lhs = g.inner(&g.laplacian_apply(&f)?, &h)?;
            let rhs = g.energy(&f, &h)?;
            record("green", lhs, rhs, (lhs - rhs).abs());
            let (lhs, rhs) = coarea_sides(&g, &PairWeights::edge_weights(&g), &f)?;
            record("coarea", lhs, rhs, (lhs - rhs).abs());
            let area = area_sides(&g, &pos, alpha)?;
            record(
                "area",
                area.sum,
                area.integral,
                (area.sum - area.integral).abs(),
            );
            let step = StepFunction::distribution(&g, &pos)?;
            let (lhs, rhs) = decreasing_inequality_check(&step, alpha)?;
            record("decreasing", lhs, rhs, (lhs - rhs).max(0.0));
        }
    }
    for (name, err) in worst {
        r.hard(&format!("{name}_max_error"), err, err <= 1e-10);
    }
    r.tables.push(table);
    Ok(())
}

fn closed_form(r: &mut SuiteReport) -> Outcome {
    let g = two_vertices();
    let k = HeatKernel::on_domain(&g, &VertexSet::full(2))?;
    let mut table = Table::new(
        "closed_form",
        &["t", "x", "y", "p", "closed_form", "abs_error"],
    );
    let mut worst: f64 = 0.0;
    for t in [0.1, 1.0, 10.0] {
        let e = (-2.0_f64 * t).exp();
        for (y, exact) in [(0, (1.0 + e) / 2.0), (1, (1.0 - e) / 2.0)] {
            let p = k.value(t, 0, y)?;
            worst = worst.max((p - exact).abs());
            table.push(vec![
                num(t),
                "0".into(),
                y.to_string(),
                num(p),
                num(exact),
                num((p - exact).abs()),
            ]);
        }
    }
    r.hard("closed_form_max_error", worst, worst <= 1e-12);
    r.tables.push(table);
    Ok(())
}

/// The γ = 1 anti-tree and its reduced line, both truncated at 12 levels.
fn matched_instance() -> Result<(SphereFunction, AntiTree, ReducedLine), AppError> {
    let s = SphereFunction::power(1.0)?;
    let tree = build_antitree(&s, 12)?;
    let line = reduce(&s, 12)?;
    Ok((s, tree, line))
}

/// Pairs with `|x| ≠ |y|` or `x = y`, with `x ≤ y`.
fn admissible_pairs(tree: &AntiTree, domain: &VertexSet) -> Vec<(VertexId, VertexId)> {
    let mut pairs = Vec::new();
    for x in domain.iter() {
        for y in domain.iter().filter(|&y| y >= x) {
            if x == y || tree.level(x) != tree.level(y) {
                pairs.push((x, y));
            }
        }
    }
    pairs
}

fn reduction(r: &mut SuiteReport) -> Outcome {
    let (s, tree, line) = matched_instance()?;
    let g = tree.graph();
    let domain = interior_domain(g);
    let full = HeatKernel::on_domain(g, &domain)?;
    let reduced = line_kernel(&line)?;
    let pairs = admissible_pairs(&tree, &domain);
    let mut table = Table::new(
        "reduction",
        &[
            "t",
            "level_x",
            "level_y",
            "p_line",
            "max_abs_error",
            "corrected_max_abs_error",
        ],
    );
    let (mut literal, mut off, mut corrected): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for t in [0.5, 1.0, 2.0, 5.0] {
        let mut cells: BTreeMap<(usize, usize), (f64, f64, f64)> = BTreeMap::new();
        for &(x, y) in &pairs {
            let (lx, ly) = (tree.level(x), tree.level(y));
            let p_full = full.value(t, x, y)?;
            let p_line = reduced.value(t, lx, ly)?;
            let err = (p_full - p_line).abs();
            let fixed = if x == y {
                let size = s.size(lx as i64) as f64;
                let c = p_line + (1.0 - 1.0 / size) * (-t * g.weighted_degree(x)).exp();
                (p_full - c).abs()
            } else {
                off = off.max(err);
                err
            };
            literal = literal.max(err);
            corrected = corrected.max(fixed);
            let cell = cells.entry((lx, ly)).or_insert((p_line, 0.0, 0.0));
            cell.1 = cell.1.max(err);
            cell.2 = cell.2.max(fixed);
        }
        for ((lx, ly), (p, e, f)) in cells {
            table.push(vec![
                num(t),
                lx.to_string(),
                ly.to_string(),
                num(p),
                num(e),
                num(f),
            ]);
        }
    }
    r.finding("literal_max_error", literal, literal <= 1e-10);
    r.hard("offdiagonal_max_error", off, off <= 1e-10);
    r.hard("corrected_max_error", corrected, corrected <= 1e-10);
    r.tables.push(table);
    Ok(())
}

fn metric_reduction(r: &mut SuiteReport) -> Outcome {
    let (_, tree, line) = matched_instance()?;
    let rho = VertexMetric::path_degree(tree.graph())?;
    let rho_line = VertexMetric::path_degree(line.graph())?;
    let all = VertexSet::full(tree.graph().vertex_count());
    let mut cells: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    let mut worst: f64 = 0.0;
    for (x, y) in admissible_pairs(&tree, &all) {
        let (lx, ly) = (tree.level(x), tree.level(y));
        let want = rho_line.distance(lx, ly);
        let err = (rho.distance(x, y) - want).abs();
        worst = worst.max(err);
        let cell = cells.entry((lx, ly)).or_insert((want, 0.0));
        cell.1 = cell.1.max(err);
    }
    let mut table = Table::new(
        "metric_reduction",
        &["level_x", "level_y", "rho_line", "max_abs_error"],
    );
    for ((lx, ly), (d, e)) in cells {
        table.push(vec![lx.to_string(), ly.to_string(), num(d), num(e)]);
    }
    r.hard("metric_max_error", worst, worst <= 1e-12);
    r.tables.push(table);
    Ok(())
}

fn intrinsic(r: &mut SuiteReport, c: &ExperimentConfig) -> Outcome {
    let mut graphs: Vec<(String, WeightedGraph, bool)> = Vec::new();
    let mut rng = rng(c.seed ^ 0x5eed);
    for i in 0..10 {
        let size = rng.gen_range(2..=15);
        graphs.push((
            format!("random_{i}"),
            random_graph(&mut rng, size, 0.3),
            false,
        ));
    }
    graphs.push(("two_vertex".into(), two_vertices(), false));
    for gamma in [0.0, 0.5, 1.0, 1.5] {
        let s = SphereFunction::power(gamma)?;
        graphs.push((
            format!("antitree_g{gamma}_n6"),
            build_antitree(&s, 6)?.graph().clone(),
            false,
        ));
        graphs.push((
            format!("line_g{gamma}_n400"),
            reduce(&s, 400)?.graph().clone(),
            true,
        ));
    }
    let mut table = Table::new(
        "intrinsic",
        &["graph", "vertices", "worst_slack", "jump_size"],
    );
    let mut min_slack = f64::INFINITY;
    let mut line_jump: f64 = 0.0;
    for (name, g, is_line) in &graphs {
        let rho = VertexMetric::path_degree(g)?;
        let report = rho.verify_intrinsic();
        let worst = report.worst().map_or(0.0, |(_, s)| s);
        min_slack = min_slack.min(worst);
        let jump = rho.jump_size();
        if *is_line {
            line_jump = line_jump.max(jump);
        }
        table.push(vec![
            name.clone(),
            g.vertex_count().to_string(),
            num(worst),
            num(jump),
        ]);
    }
    r.hard("min_slack", min_slack, min_slack >= -1e-12);
    r.hard("line_max_jump", line_jump, line_jump <= 1.0);
    r.tables.push(table);
    Ok(())
}

/// `max_{x,y} |Σ_z p_s(x,z) p_t(z,y) m(z) − p_{s+t}(x,y)|` over the kernel domain.
fn semigroup_residual(g: &WeightedGraph, k: &HeatKernel, s: f64, t: f64) -> Result<f64, AppError> {
    let dom = k.domain();
    let rows_s: Vec<Vec<f64>> = dom.iter().map(|&x| k.row(s, x)).collect::<Result<_, _>>()?;
    let rows_t: Vec<Vec<f64>> = dom.iter().map(|&x| k.row(t, x)).collect::<Result<_, _>>()?;
    let mut worst: f64 = 0.0;
    for (i, &x) in dom.iter().enumerate() {
        let joint = k.row(s + t, x)?;
        for (j, _) in dom.iter().enumerate() {
            let composed: f64 = dom
                .iter()
                .enumerate()
                .map(|(z, &vz)| rows_s[i][z] * rows_t[z][j] * g.measure(vz))
                .sum();
            worst = worst.max((composed - joint[j]).abs());
        }
    }
    Ok(worst)
}

fn semigroup(r: &mut SuiteReport, c: &ExperimentConfig) -> Outcome {
    let mut residual: f64 = 0.0;
    let mut mass: f64 = 0.0;
    let mut rng = rng(c.seed ^ 0x6e6d);
    let check_kernel =
        |g: &WeightedGraph, k: &HeatKernel, residual: &mut f64, mass: &mut f64| -> Outcome {
            for (s, t) in [(0.3, 0.7), (1.0, 2.0), (2.5, 2.5)] {
                *residual = residual.max(semigroup_residual(g, k, s, t)?);
            }
            for &x in k.domain() {
                for t in [0.1, 1.0, 10.0] {
                    *mass = mass.max(k.mass(t, x)?);
                }
            }
            Ok(())
        };
    for _ in 0..5 {
        let size = rng.gen_range(2..=12);
        let g = random_graph(&mut rng, size, 0.3);
        let k = HeatKernel::on_domain(&g, &VertexSet::full(size))?;
        check_kernel(&g, &k, &mut residual, &mut mass)?;
    }

    let line = reduce(&SphereFunction::power(1.0)?, 200)?;
    let tree = build_antitree(&SphereFunction::power(0.5)?, 10)?;
    let tree_probes = vec![
        (tree.root(), tree.root()),
        (tree.root(), tree.sphere(2).start),
        (tree.sphere(1).start, tree.sphere(3).end - 1),
    ];
    let instances: [(&str, &WeightedGraph, Probes); 2] = [
        ("line_g1_n200", line.graph(), vec![(0, 0), (0, 3), (2, 5)]),
        ("antitree_g0.5_n10", tree.graph(), tree_probes),
    ];
    let mut table = Table::new(
        "exhaustion_trace",
        &[
            "instance",
            "step",
            "radius",
            "domain_size",
            "x",
            "y",
            "t",
            "p",
            "verdict",
        ],
    );
    let mut min_increment = f64::INFINITY;
    for (name, g, probes) in instances {
        let rho = VertexMetric::path_degree(g)?;
        let options = ExhaustionOptions {
            probes: probes.clone(),
            times: vec![0.5, 2.0, 8.0],
            ..ExhaustionOptions::default()
        };
        let ex = exhaustion_converge(g, &rho, probes[0].0, &options)?;
        for (i, step) in ex.trace.iter().enumerate() {
            for (pi, &(x, y)) in probes.iter().enumerate() {
                for (ti, &t) in options.times.iter().enumerate() {
                    let v = step.values[pi * options.times.len() + ti];
                    if i > 0 {
                        let prev = ex.trace[i - 1].values[pi * options.times.len() + ti];
                        min_increment = min_increment.min(v - prev);
                    }
                    table.push(vec![
                        name.into(),
                        i.to_string(),
                        num(step.radius),
                        step.size.to_string(),
                        x.to_string(),
                        y.to_string(),
                        num(t),
                        num(v),
                        ex.verdict.label().into(),
                    ]);
                }
            }
        }
        check_kernel(g, &ex.kernel, &mut residual, &mut mass)?;
    }
    r.hard("semigroup_max_residual", residual, residual <= 1e-9);
    r.hard("max_mass", mass, mass <= 1.0 + 1e-10);
    r.hard(
        "exhaustion_min_increment",
        min_increment,
        min_increment >= -1e-12,
    );
    r.tables.push(table);
    Ok(())
}

/// Least-squares slope of `y` against `x`.
fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn decay(r: &mut SuiteReport) -> Outcome {
    let line = reduce(&SphereFunction::power(1.0)?, 4000)?;
    let k = line_kernel(&line)?;
    let size = k.domain().len();
    let mut table = Table::new("decay", &["t", "p", "domain_size", "verdict"]);
    let mut points = Vec::new();
    for t in geometric_grid(50.0, 800.0, DEFAULT_GRID_RATIO)? {
        let p = k.value(t, 0, 0)?;
        points.push((t.ln(), p.ln()));
        table.push(vec![
            num(t),
            num(p),
            size.to_string(),
            Verdict::Truncated.label().into(),
        ]);
    }
    let fit = slope(&points);
    r.finding("slope", fit, (fit + 2.0).abs() <= 0.3);
    r.measure("lambda_bottom", k.lambda_bottom());
    r.tables.push(table);
    Ok(())
}

fn bands(r: &mut SuiteReport) -> Outcome {
    let mut table = Table::new(
        "bands",
        &[
            "gamma", "quantity", "lo", "hi", "min", "max", "argmin", "argmax", "spread",
        ],
    );
    for gamma in [0.5, 1.0, 1.5] {
        let entries = [
            ("volume", 2.0, 30.0, volume_band(gamma, 0, 2.0, 30.0)?),
            ("distance", 4.0, 400.0, distance_band(gamma, 4, 400)?),
            (
                "degree_mean",
                2.0,
                30.0,
                degree_band(gamma, Exponent::Finite(2.0), 2.0, 30.0)?,
            ),
        ];
        for (quantity, lo, hi, band) in entries {
            let label = [gamma, lo, hi].map(num);
            band_row(
                &mut table,
                &[
                    label[0].clone(),
                    quantity.into(),
                    label[1].clone(),
                    label[2].clone(),
                ],
                &band,
            );
            r.finding(
                &format!("{quantity}_spread_g{gamma}"),
                band.spread(),
                band.spread() <= 10.0,
            );
        }
    }
    let early = volume_band(1.0, 0, 1.0, 20.0)?;
    r.measure("volume_spread_g1_r1_20", early.spread());
    r.tables.push(table);
    Ok(())
}

fn isoperimetry(r: &mut SuiteReport) -> Outcome {
    let s = SphereFunction::power(1.0)?;
    let n = 2.0 * dimension(1.0);
    let line = reduce(&s, levels_for_radius(&s, 20.0)?)?;
    let rho = VertexMetric::path_degree(line.graph())?;
    let g = line.graph();
    let mut table = Table::new(
        "isoperimetry",
        &[
            "r",
            "ball_vertices",
            "ball_measure",
            "h_balls",
            "h_segments",
            "h_brute",
            "band",
        ],
    );
    let mut band = Vec::new();
    let mut brute_excess = f64::NEG_INFINITY;
    let mut seg_gap: f64 = 0.0;
    let mut worst_ratio: f64 = 1.0;
    for i in 0..37 {
        let radius = 2.0 + 0.5 * i as f64;
        let u = rho.interior_ball(0, radius)?.members;
        let mass = g.total_measure(&u);
        let balls = isoperimetric_balls(&rho, 0, &u, n)?;
        let seg = isoperimetric_segments(&rho, &u, n)?;
        let value = balls.value * radius / mass.powf(2.0 / n);
        band.push((radius, value));
        let brute = if u.len() <= BRUTE_FORCE_CAP {
            let b = isoperimetric_bruteforce(&rho, &u, n)?;
            brute_excess = brute_excess.max(b.value - balls.value);
            seg_gap = seg_gap.max((b.value - seg.value).abs() / b.value.max(1e-300));
            worst_ratio = worst_ratio.max(balls.value / b.value);
            num(b.value)
        } else {
            String::new()
        };
        table.push(vec![
            num(radius),
            u.len().to_string(),
            num(mass),
            num(balls.value),
            num(seg.value),
            brute,
            num(value),
        ]);
    }
    let report = BandReport::from_samples(band).expect("nonempty grid");
    r.finding("band_spread", report.spread(), report.spread() <= 10.0);
    r.hard("brute_minus_balls", brute_excess, brute_excess <= 0.0);
    r.hard("segments_vs_brute", seg_gap, seg_gap <= 1e-12);
    r.measure("max_balls_over_brute", worst_ratio);
    r.tables.push(table);
    Ok(())
}

fn sobolev(r: &mut SuiteReport, c: &ExperimentConfig) -> Outcome {
    let mut rng = rng(c.seed ^ 0x50b0);
    let mut table = Table::new(
        "sobolev",
        &[
            "gamma",
            "r",
            "n",
            "h",
            "trials",
            "violations",
            "inner_factor_violations",
        ],
    );
    let mut cs_table = Table::new(
        "sobolev_constant",
        &["gamma", "R", "best_family", "implied_constant"],
    );
    let mut violations = 0usize;
    for gamma in [0.5, 1.0] {
        let s = SphereFunction::power(gamma)?;
        let n = 2.0 * dimension(gamma);
        for radius in [4.0, 8.0, 16.0] {
            let line = reduce(&s, levels_for_radius(&s, radius)?)?;
            let g = line.graph();
            let rho = VertexMetric::path_degree(g)?;
            let u = rho.interior_ball(0, radius)?.members;
            let h = isoperimetric_segments(&rho, &u, n)?.value;
            let (mut bad, mut bad_inner) = (0usize, 0usize);
            for _ in 0..100 {
                let phi = random_supported(&mut rng, &u);
                let rep = sobolev_check(g, &u, n, radius, h, &phi)?;
                bad += usize::from(!rep.holds);
                bad_inner += usize::from(rep.inner_factor_slack < 0.0);
            }
            violations += bad;
            table.push(vec![
                num(gamma),
                num(radius),
                num(n),
                num(h),
                "100".into(),
                bad.to_string(),
                bad_inner.to_string(),
            ]);
        }

        let mut best_per_radius = Vec::new();
        for radius in [4.0, 8.0, 16.0] {
            let line = reduce(&s, levels_for_radius(&s, radius)?)?;
            let g = line.graph();
            let rho = VertexMetric::path_degree(g)?;
            let ball = rho.interior_ball(0, radius)?.members;
            let support = g.interior(&ball);
            let dist = rho.distances_from(0);
            let mut family = radial_families(&dist, &support, radius, &[0.25, 0.5, 0.75, 1.0]);
            for i in 0..100 {
                family.push((format!("random_{i}"), random_supported(&mut rng, &support)));
            }
            let mut best = (String::new(), 0.0);
            for (name, u) in &family {
                let v = sobolev_def_check(&rho, 0, n, radius, 1.0, u)?.implied_constant;
                if v > best.1 {
                    best = (name.clone(), v);
                }
            }
            cs_table.push(vec![num(gamma), num(radius), best.0.clone(), num(best.1)]);
            best_per_radius.push((radius, best.1));
        }
        let stab = BandReport::from_samples(best_per_radius)
            .expect("three radii")
            .spread();
        r.finding(&format!("constant_stability_g{gamma}"), stab, stab <= 3.0);
    }
    r.hard("violations", violations as f64, violations == 0);
    r.tables.push(table);
    r.tables.push(cs_table);
    Ok(())
}

fn zeta_suite(r: &mut SuiteReport) -> Outcome {
    let asym = zeta(5.0, 1e4, 1.0)? * 2e4 / 25.0;
    r.hard("asymptotic_ratio", asym, (0.99..=1.01).contains(&asym));
    let mut table = Table::new("zeta", &["r", "t", "S", "zeta", "rescaled", "abs_error"]);
    let mut worst: f64 = 0.0;
    for rr in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0] {
        for t in [0.1, 1.0, 10.0, 100.0, 1e4] {
            for s in [0.25, 0.5, 2.0, 3.0] {
                let z = zeta(rr, t, s)?;
                let scaled = zeta(rr * s, t, 1.0)? / (s * s);
                let err = (z - scaled).abs() / z.abs().max(1.0);
                worst = worst.max(err);
                table.push(vec![num(rr), num(t), num(s), num(z), num(scaled), num(err)]);
            }
        }
    }
    r.hard("scaling_max_error", worst, worst <= 1e-12);
    r.tables.push(table);
    Ok(())
}

fn ratio_row(table: &mut Table, formula: &str, report: &RatioReport, size: usize) {
    for row in &report.rows {
        table.push(vec![
            formula.into(),
            num(row.t),
            row.x.to_string(),
            row.y.to_string(),
            num(row.kernel),
            num(row.shape),
            num(row.ratio),
            row.flags.clone(),
            size.to_string(),
            Verdict::Truncated.label().into(),
        ]);
    }
}

fn ratio_findings(r: &mut SuiteReport, formula: &str, report: &RatioReport) {
    let stab = report.time_stability().unwrap_or(f64::NAN);
    let growth = report.growth().unwrap_or(f64::NAN);
    r.finding(&format!("{formula}_time_stability"), stab, stab <= 3.0);
    r.finding(&format!("{formula}_growth"), growth, growth <= 3.0);
    r.measure(&format!("{formula}_sup"), report.sup);
    r.measure(
        &format!("{formula}_decade_stability"),
        report.decade_stability().unwrap_or(f64::NAN),
    );
    r.measure(&format!("{formula}_excluded"), report.excluded as f64);
}

fn ratios(r: &mut SuiteReport) -> Outcome {
    const GAMMA: f64 = 0.5;
    const REACH: usize = 20;
    let s = SphereFunction::power(GAMMA)?;
    let line = reduce(&s, 4000)?;
    let g = line.graph();
    let rho = VertexMetric::path_degree(g)?;
    let kernel = line_kernel(&line)?;
    let size = kernel.domain().len();
    let d = dimension(GAMMA);
    let n = 2.0 * d;
    let mut times = geometric_grid(2.0 * 72.0 * 72.0, 8e4, DEFAULT_GRID_RATIO)?;
    if times.last().is_some_and(|&t| t < 8e4) {
        times.push(8e4);
    }
    let dist = rho.distances_from(0);
    let volume_at = |center: usize| volume_profile(&rho, center);
    let root_volume = volume_at(0);
    let volumes: Vec<_> = (0..=REACH).map(volume_at).collect();
    let jump = rho.jump_size();
    let mut params = BoundParams::new(n, d, Exponent::Infinite, jump, 72.0, 288.0)?;
    params.c_free = 1.0;
    let gamma_params = GammaParams::new(n, params.beta(), jump, Exponent::Infinite)?;

    // p(x, y) on the anti-tree from the line: off the diagonal the reduction is
    // exact; on it the same-sphere eigenfunctions add (1 − 1/s_k) e^{−t Deg}.
    let antitree_kernel = |t: f64, k: usize, l: usize| -> Result<f64, AppError> {
        let p = kernel.value(t, k, l)?;
        Ok(if k == l {
            p + (1.0 - 1.0 / s.size(k as i64) as f64) * (-t * s.degree(k) as f64).exp()
        } else {
            p
        })
    };

    let mut inputs: BTreeMap<&str, Vec<RatioInput>> = BTreeMap::new();
    for &t in &times {
        let vol = root_volume.eval(t.sqrt()).expect("interior radius");
        let gammas: Vec<f64> = (0..=REACH)
            .map(|k| {
                gamma_error(
                    &rho,
                    0,
                    params.anchor_radius(t, dist[k]),
                    Exponent::Infinite,
                    &gamma_params,
                )
            })
            .collect::<Result<_, _>>()?;
        let main_volume = root_volume
            .eval(params.volume_radius(t))
            .expect("interior radius");
        for k in 0..=REACH {
            for l in 0..=REACH {
                let p = Some(antitree_kernel(t, k, l)?);
                let rho_kl = rho.distance(k, l);
                let mut push = |formula: &'static str, shape: BoundValue| {
                    inputs.entry(formula).or_default().push(RatioInput {
                        t,
                        x: k,
                        y: l,
                        kernel: p,
                        shape,
                    });
                };
                push(
                    "antitree1",
                    antitree_bound_intrinsic(
                        &IntrinsicInput {
                            gamma: GAMMA,
                            n,
                            exponent: None,
                            rho_ox: dist[k],
                            rho_oy: dist[l],
                            rho_xy: rho_kl,
                            volume: vol,
                            pair_admissible: true,
                        },
                        t,
                        1.0,
                    )?,
                );
                push(
                    "antitree1c",
                    antitree_bound_combinatorial(GAMMA, k as u64, l as u64, t, 1.0, None)?,
                );
                push(
                    "antitree2",
                    antitree2_bound(
                        &TwoPointInput {
                            gamma: GAMMA,
                            n,
                            rho_ox: dist[k],
                            rho_oy: dist[l],
                            rho_xy: rho_kl,
                            volume_x: volumes[k].eval(t.sqrt()).expect("interior radius"),
                            volume_y: volumes[l].eval(t.sqrt()).expect("interior radius"),
                        },
                        t,
                        1.0,
                    )?,
                );
                push(
                    "main",
                    anchored_bound(
                        &params,
                        &AnchoredGeometry {
                            gamma_x: gammas[k],
                            gamma_y: gammas[l],
                            rho_ox: dist[k],
                            rho_oy: dist[l],
                            rho_xy: rho_kl,
                            volume: main_volume,
                        },
                        t,
                    )?,
                );
            }
        }
    }

    let mut table = Table::new(
        "ratios",
        &[
            "formula",
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
    for (formula, list) in inputs {
        let report = ratio_report(list);
        ratio_row(&mut table, formula, &report, size);
        ratio_findings(r, formula, &report);
        if matches!(formula, "antitree1" | "main") {
            r.hard(
                &format!("{formula}_flagged"),
                report.flagged as f64,
                report.flagged == 0,
            );
        } else {
            r.measure(&format!("{formula}_flagged"), report.flagged as f64);
        }
    }

    let t_ref = 1e4;
    let geometry = AnchoredGeometry {
        gamma_x: gamma_error(
            &rho,
            0,
            params.anchor_radius(t_ref, 0.0),
            Exponent::Infinite,
            &gamma_params,
        )?,
        gamma_y: 0.0,
        rho_ox: 0.0,
        rho_oy: 0.0,
        rho_xy: 0.0,
        volume: root_volume
            .eval(params.volume_radius(t_ref))
            .expect("interior radius"),
    };
    let reference = anchored_bound(
        &params,
        &AnchoredGeometry {
            gamma_y: geometry.gamma_x,
            ..geometry
        },
        t_ref,
    )?;
    r.measure("main_reference_shape_t1e4", reference.value);
    r.measure("jump_size", jump);
    r.tables.push(table);
    Ok(())
}

fn lambda(r: &mut SuiteReport) -> Outcome {
    let s = SphereFunction::power(1.0)?;
    let mut table = Table::new("lambda", &["levels", "lambda_bottom"]);
    let mut values = Vec::new();
    for levels in [100, 200, 400, 800] {
        let line = reduce(&s, levels)?;
        let l = lambda_bottom(line.graph(), &[interior_domain(line.graph())])?[0];
        values.push(l);
        table.push(vec![levels.to_string(), num(l)]);
    }
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    r.hard(
        "strictly_decreasing",
        f64::from(u8::from(decreasing)),
        decreasing,
    );
    let last = *values.last().expect("four truncations");
    r.finding("lambda_800", last, last < 1e-2);
    r.tables.push(table);
    Ok(())
}

/// Graph named by the configuration: a file, or a generated line or anti-tree.
pub fn configured_graph(c: &ExperimentConfig) -> Result<WeightedGraph, AppError> {
    match &c.graph {
        Some(path) => read_graph(path).map_err(|source| AppError::Graph {
            path: path.clone(),
            source,
        }),
        None => {
            let s = SphereFunction::power(c.gamma)?;
            Ok(match c.shape {
                Shape::Line => reduce(&s, c.levels)?.graph().clone(),
                Shape::Antitree => build_antitree(&s, c.levels)?.graph().clone(),
            })
        }
    }
}

pub fn configured_metric<'g>(
    g: &'g WeightedGraph,
    c: &ExperimentConfig,
) -> Result<VertexMetric<'g>, AppError> {
    Ok(match c.metric {
        MetricChoice::Degree => VertexMetric::path_degree(g)?,
        MetricChoice::Combinatorial => VertexMetric::combinatorial(g)?,
    })
}

fn custom(r: &mut SuiteReport, c: &ExperimentConfig) -> Outcome {
    let g = configured_graph(c)?;
    if c.anchor >= g.vertex_count() {
        return Err(AppError::Usage(format!(
            "anchor {} outside a graph with {} vertices",
            c.anchor,
            g.vertex_count()
        )));
    }
    let rho = configured_metric(&g, c)?;
    let mut probes = vec![(c.anchor, c.anchor)];
    probes.extend(g.neighbors(c.anchor).map(|(y, _)| (c.anchor, y)));
    let times = geometric_grid(c.t_grid.start, c.t_grid.end, c.t_grid.ratio)?;
    let options = ExhaustionOptions {
        probes: probes.clone(),
        times: times.clone(),
        tol: c.tolerance,
        ..ExhaustionOptions::default()
    };
    let ex = exhaustion_converge(&g, &rho, c.anchor, &options)?;
    if ex.verdict == Verdict::Unconverged {
        return Err(AppError::Unconverged(format!(
            "{} steps, last domain {} vertices",
            ex.trace.len(),
            ex.domain.len()
        )));
    }
    let mut table = Table::new(
        "custom_kernel",
        &["t", "x", "y", "p", "domain_size", "verdict"],
    );
    let (mut asym, mut mass): (f64, f64) = (0.0, 0.0);
    for &t in &times {
        for &(x, y) in &probes {
            if !(ex.kernel.contains(x) && ex.kernel.contains(y)) {
                continue;
            }
            let p = ex.kernel.value(t, x, y)?;
            asym = asym.max((p - ex.kernel.value(t, y, x)?).abs());
            table.push(vec![
                num(t),
                x.to_string(),
                y.to_string(),
                num(p),
                ex.domain.len().to_string(),
                ex.verdict.label().into(),
            ]);
        }
        for &x in ex.kernel.domain() {
            mass = mass.max(ex.kernel.mass(t, x)?);
        }
    }
    r.hard("kernel_asymmetry", asym, asym <= 1e-10);
    r.hard("max_mass", mass, mass <= 1.0 + 1e-10);
    if c.metric == MetricChoice::Degree {
        let worst = rho.verify_intrinsic().worst().map_or(0.0, |(_, s)| s);
        r.hard("min_slack", worst, worst >= -1e-12);
    }
    let mut rng = rng(c.seed);
    let size = g.vertex_count();
    let mut green: f64 = 0.0;
    for _ in 0..10 {
        let f = random_function(&mut rng, size, -1.0, 1.0);
        let h = random_function(&mut rng, size, -1.0, 1.0);
        let lhs = g.inner(&g.laplacian_apply(&f)?, &h)?;
        let rhs = g.energy(&f, &h)?;
        green = green.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
    }
    r.hard("green_max_error", green, green <= 1e-10);
    r.measure("domain_size", ex.domain.len() as f64);
    r.tables.push(table);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let points: Vec<(f64, f64)> = [1.0_f64, 2.0, 4.0, 8.0]
            .iter()
            .map(|&t| (t.ln(), (3.0 * t.powf(-1.5)).ln()))
            .collect();
        assert!((slope(&points) + 1.5).abs() < 1e-14);
    }

    #[test]
    fn admissible_pairs_skip_same_sphere() {
        let s = SphereFunction::table(vec![1, 2, 3]).unwrap();
        let tree = build_antitree(&s, 3).unwrap();
        let pairs = admissible_pairs(&tree, &VertexSet::full(7));
        // Spheres of sizes 1, 1, 2, 3: 7 diagonal pairs plus the cross-sphere products.
        assert_eq!(pairs.len(), 7 + (1 + 2 + 3) + (2 + 3) + 6);
        assert!(pairs
            .iter()
            .all(|&(x, y)| x == y || tree.level(x) != tree.level(y)));
    }

    #[test]
    fn interior_domain_drops_frontier() {
        let line = reduce(&SphereFunction::power(1.0).unwrap(), 5).unwrap();
        let d = interior_domain(line.graph());
        assert_eq!(d.to_vec(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn small_suites_pass() {
        let config = ExperimentConfig::default();
        for suite in [
            Suite::Identities,
            Suite::ClosedForm,
            Suite::Zeta,
            Suite::MetricReduction,
        ] {
            let report = run_suite(suite, &config).unwrap();
            assert!(report.hard_passed(), "{}", suite);
            assert!(!report.tables.is_empty());
        }
    }

    #[test]
    fn custom_rejects_out_of_range_anchor() {
        let config = ExperimentConfig {
            levels: 4,
            anchor: 99,
            ..ExperimentConfig::default()
        };
        let err = run_suite(Suite::Custom, &config).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
