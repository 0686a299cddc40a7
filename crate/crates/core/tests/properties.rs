use heatbound::antitree::{build_antitree, reduce, SphereFunction};
use heatbound::bounds::{
    antitree_bound_combinatorial, antitree_bound_intrinsic, zeta, IntrinsicInput,
};
use heatbound::functionals::{
    decreasing_inequality_check, isoperimetric_balls, isoperimetric_bruteforce, sobolev_check,
    StepFunction,
};
use heatbound::graph::{area_sides, coarea_sides, parse_graph, write_graph, PairWeights};
use heatbound::heat::HeatKernel;
use heatbound::suite::{random_function, random_graph, random_supported, rng};
use heatbound::{VertexMetric, VertexSet, WeightedGraph};
use proptest::prelude::*;

fn graph(seed: u64, size: usize) -> WeightedGraph {
    random_graph(&mut rng(seed), size, 0.3)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn green_identity(seed in any::<u64>(), size in 1usize..14) {
        let g = graph(seed, size);
        let mut r = rng(seed ^ 1);
        let f = random_function(&mut r, size, -1.0, 1.0);
        let h = random_function(&mut r, size, -1.0, 1.0);
        let lf = g.laplacian_apply(&f).unwrap();
        prop_assert!(close(g.inner(&lf, &h).unwrap(), g.energy(&f, &h).unwrap(), 1e-12));
    }

    #[test]
    fn coarea_and_area(seed in any::<u64>(), size in 1usize..14, alpha in 0.05f64..=1.0) {
        let g = graph(seed, size);
        let mut r = rng(seed ^ 2);
        let f = random_function(&mut r, size, -2.0, 2.0);
        let w = PairWeights::edge_weights(&g);
        let (lhs, rhs) = coarea_sides(&g, &w, &f).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
        let pos: Vec<f64> = f.iter().map(|v| v.abs()).collect();
        let a = area_sides(&g, &pos, alpha).unwrap();
        prop_assert!(close(a.sum, a.integral, 1e-11));
    }

    #[test]
    fn decreasing_function_inequality(seed in any::<u64>(), size in 1usize..14, alpha in 0.05f64..=1.0) {
        let g = graph(seed, size);
        let f = random_function(&mut rng(seed ^ 3), size, 0.0, 3.0);
        let step = StepFunction::distribution(&g, &f).unwrap();
        let (lhs, rhs) = decreasing_inequality_check(&step, alpha).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn path_degree_metric_is_intrinsic(seed in any::<u64>(), size in 1usize..14) {
        let g = graph(seed, size);
        let rho = VertexMetric::path_degree(&g).unwrap();
        prop_assert!(rho.verify_intrinsic().passes());
        for x in 0..size {
            for y in 0..size {
                prop_assert!(close(rho.distance(x, y), rho.distance(y, x), 1e-14));
                for z in 0..size {
                    prop_assert!(rho.distance(x, z) <= rho.distance(x, y) + rho.distance(y, z) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn kernel_is_symmetric_positive_submarkovian(seed in any::<u64>(), size in 1usize..10, t in 0.0f64..5.0) {
        let g = graph(seed, size);
        let k = HeatKernel::on_domain(&g, &VertexSet::full(size)).unwrap();
        for x in 0..size {
            prop_assert!(k.mass(t, x).unwrap() <= 1.0 + 1e-10);
            for y in 0..size {
                let v = k.value(t, x, y).unwrap();
                prop_assert!(v >= 0.0);
                prop_assert!(close(v, k.value(t, y, x).unwrap(), 1e-10));
            }
        }
    }

    #[test]
    fn semigroup_and_domain_monotonicity(seed in any::<u64>(), size in 2usize..10, s in 0.05f64..2.0, t in 0.05f64..2.0) {
        let g = graph(seed, size);
        let whole = HeatKernel::on_domain(&g, &VertexSet::full(size)).unwrap();
        for x in 0..size {
            for y in 0..size {
                let composed: f64 = (0..size)
                    .map(|z| whole.value(s, x, z).unwrap() * whole.value(t, z, y).unwrap() * g.measure(z))
                    .sum();
                prop_assert!((composed - whole.value(s + t, x, y).unwrap()).abs() < 1e-9);
            }
        }
        let part = VertexSet::from_vertices(size, 0..size / 2 + 1);
        let small = HeatKernel::on_domain(&g, &part).unwrap();
        for x in part.iter() {
            for y in part.iter() {
                prop_assert!(small.value(t, x, y).unwrap() <= whole.value(t, x, y).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn brute_force_is_a_minimum(seed in any::<u64>(), size in 2usize..11, n in 2.5f64..12.0) {
        let g = graph(seed, size);
        let rho = VertexMetric::path_degree(&g).unwrap();
        let u = VertexSet::from_vertices(size, 0..size - 1);
        let brute = isoperimetric_bruteforce(&rho, &u, n).unwrap();
        prop_assert!(brute.value >= 0.0 && brute.set.is_subset(&u) && !brute.set.is_empty());
        if let Ok(balls) = isoperimetric_balls(&rho, 0, &u, n) {
            prop_assert!(brute.value <= balls.value * (1.0 + 1e-12));
        }
        let mut r = rng(seed ^ 4);
        let w = random_supported(&mut r, &u);
        let set = VertexSet::from_vertices(size, (0..size).filter(|&x| w[x] > 0.0));
        if !set.is_empty() {
            let a = (n - 2.0) / n;
            let ratio = rho.boundary_weight(&set) / g.total_measure(&set).powf(a);
            prop_assert!(brute.value <= ratio * (1.0 + 1e-12));
        }
    }

    #[test]
    fn isoperimetric_sobolev_holds(seed in any::<u64>(), size in 2usize..10, n in 2.5f64..12.0, c in 0.5f64..20.0) {
        let g = graph(seed, size);
        let rho = VertexMetric::path_degree(&g).unwrap();
        let u = VertexSet::from_vertices(size, 0..size - 1);
        let h = isoperimetric_bruteforce(&rho, &u, n).unwrap().value;
        let phi = random_supported(&mut rng(seed ^ 5), &u);
        let report = sobolev_check(&g, &u, n, c, h, &phi).unwrap();
        prop_assert!(report.holds, "slack {}", report.slack);
        let scaled: Vec<f64> = phi.iter().map(|v| 2.5 * v).collect();
        let twice = sobolev_check(&g, &u, n, c, h, &scaled).unwrap();
        prop_assert!(close(twice.lhs, 6.25 * report.lhs, 1e-12));
        prop_assert!(close(twice.rhs, 6.25 * report.rhs, 1e-12));
    }

    #[test]
    fn zeta_shape(r in 0.0f64..50.0, dr in 0.01f64..5.0, t in 0.1f64..1e4, dt in 0.01f64..100.0, s in 0.1f64..3.0) {
        let z = zeta(r, t, s).unwrap();
        prop_assert!(z >= 0.0);
        prop_assert!(zeta(r + dr, t, s).unwrap() >= z);
        prop_assert!(zeta(r, t + dt, s).unwrap() <= z);
        prop_assert!(close(z, zeta(r * s, t, 1.0).unwrap() / (s * s), 1e-12));
    }

    #[test]
    fn bounds_increase_with_constant(c in 0.1f64..10.0, dc in 0.01f64..10.0, lx in 0u64..20, ly in 0u64..20, t in 1e2f64..1e5) {
        let a = antitree_bound_combinatorial(1.0, lx, ly, t, c, None).unwrap().value;
        let b = antitree_bound_combinatorial(1.0, lx, ly, t, c + dc, None).unwrap().value;
        prop_assert!(b >= a);
        let input = IntrinsicInput {
            gamma: 0.5,
            n: 4.0,
            exponent: None,
            rho_ox: lx as f64,
            rho_oy: ly as f64,
            rho_xy: (lx as f64 - ly as f64).abs(),
            volume: 3.0,
            pair_admissible: true,
        };
        let a = antitree_bound_intrinsic(&input, t, c).unwrap().value;
        let b = antitree_bound_intrinsic(&input, t, c + dc).unwrap().value;
        prop_assert!(b >= a);
    }

    #[test]
    fn file_format_round_trips(seed in any::<u64>(), size in 1usize..14) {
        let g = graph(seed, size);
        let mut out = Vec::new();
        write_graph(&g, &mut out).unwrap();
        let back = parse_graph(std::str::from_utf8(&out).unwrap()).unwrap();
        prop_assert_eq!(back.measures(), g.measures());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn antitrees_are_spherically_symmetric(
        gamma in 0.0f64..1.6,
        levels in 1usize..6,
        picks in proptest::array::uniform6(any::<prop::sample::Index>()),
    ) {
        let s = SphereFunction::power(gamma).unwrap();
        let tree = build_antitree(&s, levels).unwrap();
        let line = reduce(&s, levels).unwrap();
        prop_assert_eq!(line.levels(), levels);
        let swap = |k: &prop::sample::Index, a: &prop::sample::Index, b: &prop::sample::Index| {
            let sphere = tree.sphere(k.index(levels + 1));
            let len = sphere.len();
            (sphere.start + a.index(len), sphere.start + b.index(len))
        };
        let (x, x2) = swap(&picks[0], &picks[1], &picks[2]);
        let (y, y2) = swap(&picks[3], &picks[4], &picks[5]);
        if let Ok(ok) = tree.check_characterization(x, x2, y, y2) {
            prop_assert!(ok);
        }
        let total: f64 = tree.graph().measures().iter().sum();
        let line_total: f64 = line.graph().measures().iter().sum();
        prop_assert_eq!(total, line_total);
    }
}
