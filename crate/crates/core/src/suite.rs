//! Seeded random instances and test-function families for verification suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{VertexSet, WeightedGraph};

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph on `vertices` vertices: a random spanning tree plus each
/// remaining pair with probability `density`. Weights and measures are uniform
/// in `[0.1, 2)`.
pub fn random_graph(rng: &mut SuiteRng, vertices: usize, density: f64) -> WeightedGraph {
    assert!(vertices >= 1);
    let mut order: Vec<usize> = (0..vertices).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    let mut present = vec![false; vertices * vertices];
    for i in 1..vertices {
        let (u, v) = (order[i], order[rng.gen_range(0..i)]);
        present[u * vertices + v] = true;
        present[v * vertices + u] = true;
        edges.push((u.min(v), u.max(v), rng.gen_range(0.1..2.0)));
    }
    for u in 0..vertices {
        for v in u + 1..vertices {
            if !present[u * vertices + v] && rng.gen_bool(density) {
                edges.push((u, v, rng.gen_range(0.1..2.0)));
            }
        }
    }
    let measure = (0..vertices).map(|_| rng.gen_range(0.1..2.0)).collect();
    WeightedGraph::new(measure, edges).expect("valid random graph")
}

/// Uniform values in `[lo, hi)`.
pub fn random_function(rng: &mut SuiteRng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Uniform values in `[−1, 1)` on `support`, zero elsewhere.
pub fn random_supported(rng: &mut SuiteRng, support: &VertexSet) -> Vec<f64> {
    (0..support.universe())
        .map(|x| {
            if support.contains(x) {
                rng.gen_range(-1.0..1.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// Radial test functions of the distance `dist` to an anchor, restricted to
/// `support`: a delta at the anchor, and for each fraction `c` the indicator of
/// `ρ ≤ cR`, the hat `(cR − ρ)₊` and `cos(πρ/(2cR))` on `ρ ≤ cR`.
pub fn radial_families(
    dist: &[f64],
    support: &VertexSet,
    radius: f64,
    fractions: &[f64],
) -> Vec<(String, Vec<f64>)> {
    let restrict = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        dist.iter()
            .enumerate()
            .map(|(x, &d)| if support.contains(x) { f(d) } else { 0.0 })
            .collect()
    };
    let mut out = vec![(
        "delta".to_string(),
        restrict(&|d| if d == 0.0 { 1.0 } else { 0.0 }),
    )];
    for &c in fractions {
        let cr = c * radius;
        out.push((
            format!("indicator_{c}"),
            restrict(&|d| if d <= cr { 1.0 } else { 0.0 }),
        ));
        out.push((format!("hat_{c}"), restrict(&|d| (cr - d).max(0.0))));
        out.push((
            format!("cos_{c}"),
            restrict(&|d| {
                if d <= cr {
                    (std::f64::consts::FRAC_PI_2 * d / cr).cos()
                } else {
                    0.0
                }
            }),
        ));
    }
    out.retain(|(_, f)| f.iter().any(|&v| v != 0.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_graphs_repeat() {
        let a = random_graph(&mut rng(7), 12, 0.3);
        let b = random_graph(&mut rng(7), 12, 0.3);
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.measures(), b.measures());
        assert!(a.is_connected());
        assert_ne!(random_graph(&mut rng(8), 12, 0.3).edges(), a.edges());
    }

    #[test]
    fn supported_functions_vanish_outside() {
        let s = VertexSet::from_vertices(6, [1, 4]);
        let f = random_supported(&mut rng(1), &s);
        assert!(f
            .iter()
            .enumerate()
            .all(|(x, &v)| s.contains(x) || v == 0.0));
    }

    #[test]
    fn families() {
        let dist = [0.0, 1.0, 2.0, 3.0];
        let support = VertexSet::from_vertices(4, 0..3);
        let fam = radial_families(&dist, &support, 2.0, &[0.5, 1.0]);
        assert_eq!(fam[0].1, vec![1.0, 0.0, 0.0, 0.0]);
        let hat = &fam.iter().find(|(n, _)| n == "hat_1").unwrap().1;
        assert_eq!(hat, &vec![2.0, 1.0, 0.0, 0.0]);
        assert!(fam.iter().all(|(_, f)| f[3] == 0.0));
    }
}
