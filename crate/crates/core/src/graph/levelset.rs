//! Co-area and area identities, with the level-set integrals evaluated exactly.
//!
//! Both integrands are piecewise constant in `t` between consecutive distinct
//! values of `f`, so each integral is a finite sum over those level intervals.

use super::{VertexSet, WeightedGraph};
use crate::error::{check_param, Error, Result};

/// Nonnegative weights on ordered adjacent pairs, one per adjacency slot.
#[derive(Clone, Debug)]
pub struct PairWeights {
    values: Vec<f64>,
}

impl PairWeights {
    /// `w(x, y) = b(x, y)`.
    pub fn edge_weights(g: &WeightedGraph) -> Self {
        Self {
            values: (0..g.slot_count()).map(|s| g.slot_weight(s)).collect(),
        }
    }

    /// `w(x, y) = f(x, y, b(x, y))` for every adjacent ordered pair.
    pub fn from_fn(g: &WeightedGraph, mut f: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(g.slot_count());
        for x in 0..g.vertex_count() {
            for s in g.slots(x) {
                let w = f(x, g.slot_target(s), g.slot_weight(s));
                if !(w.is_finite() && w >= 0.0) {
                    return Err(Error::InvalidWeight {
                        u: x,
                        v: g.slot_target(s),
                        weight: w,
                    });
                }
                values.push(w);
            }
        }
        Ok(Self { values })
    }

    pub fn from_slots(g: &WeightedGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.slot_count() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: g.slot_count(),
            });
        }
        let mut it = values.into_iter();
        Self::from_fn(g, |_, _, _| it.next().unwrap_or(0.0))
    }

    pub fn slot(&self, slot: usize) -> f64 {
        self.values[slot]
    }

    /// `w(∂W)`, summed over ordered boundary pairs.
    pub fn boundary_weight(&self, g: &WeightedGraph, set: &VertexSet) -> f64 {
        let mut total = 0.0;
        for x in set.iter() {
            for s in g.slots(x) {
                if !set.contains(g.slot_target(s)) {
                    total += self.values[s] + self.values[g.reverse_slot(s)];
                }
            }
        }
        total
    }
}

fn distinct_sorted(f: &[f64]) -> Vec<f64> {
    let mut levels = f.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

fn superlevel(f: &[f64], t: f64) -> VertexSet {
    VertexSet::from_mask(f.iter().map(|&v| v > t).collect())
}

/// Both sides of the co-area formula:
/// `Σ_{x,y} w(x, y)|f(x) − f(y)|` and `∫ w(∂{f > t}) dt`.
///
/// The integral runs over the whole real line, which for `f ≥ 0` is the same as
/// integrating over `[0, ∞)`.
pub fn coarea_sides(g: &WeightedGraph, w: &PairWeights, f: &[f64]) -> Result<(f64, f64)> {
    g.check_len(f)?;
    let mut lhs = 0.0;
    for x in 0..g.vertex_count() {
        for s in g.slots(x) {
            lhs += w.slot(s) * (f[x] - f[g.slot_target(s)]).abs();
        }
    }

    let levels = distinct_sorted(f);
    let mut rhs = 0.0;
    for pair in levels.windows(2) {
        let set = superlevel(f, pair[0]);
        rhs += w.boundary_weight(g, &set) * (pair[1] - pair[0]);
    }
    Ok((lhs, rhs))
}

/// Both sides of the area formula for `f ≥ 0` and `0 < α ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AreaSides {
    /// `α Σ_x m(x) f(x)^{1/α}`.
    pub sum: f64,
    /// `∫_0^∞ m({f > t}) t^{1/α − 1} dt`.
    pub integral: f64,
    /// The sum side with prefactor `1/α` instead of `α`; it differs from the
    /// integral whenever `α < 1` and `f ≠ 0`.
    pub reciprocal_prefactor_sum: f64,
}

pub fn area_sides(g: &WeightedGraph, f: &[f64], alpha: f64) -> Result<AreaSides> {
    g.check_len(f)?;
    check_param(
        "alpha",
        alpha,
        alpha > 0.0 && alpha <= 1.0,
        "0 < alpha <= 1",
    )?;
    if let Some(v) = f.iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Precondition(format!(
            "area formula needs a finite nonnegative function, got {} at vertex {v}",
            f[v]
        )));
    }
    let power = 1.0 / alpha;
    let raw: f64 = (0..g.vertex_count())
        .map(|x| g.measure(x) * f[x].powf(power))
        .sum();

    // ∫_a^b t^{1/α − 1} dt = α (b^{1/α} − a^{1/α})
    let mut levels = distinct_sorted(f);
    if levels[0] > 0.0 {
        levels.insert(0, 0.0);
    }
    let mut integral = 0.0;
    for pair in levels.windows(2) {
        let mass = g.total_measure(&superlevel(f, pair[0]));
        integral += mass * alpha * (pair[1].powf(power) - pair[0].powf(power));
    }
    Ok(AreaSides {
        sum: alpha * raw,
        integral,
        reciprocal_prefactor_sum: raw / alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_vertices() -> WeightedGraph {
        WeightedGraph::new(vec![1.0, 1.0], [(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn coarea_constant_and_single_edge() {
        let g = two_vertices();
        let w = PairWeights::edge_weights(&g);
        assert_eq!(coarea_sides(&g, &w, &[0.4, 0.4]).unwrap(), (0.0, 0.0));
        assert_eq!(coarea_sides(&g, &w, &[1.0, 0.0]).unwrap(), (2.0, 2.0));
    }

    #[test]
    fn coarea_handles_negative_values() {
        let g = WeightedGraph::new(vec![1.0; 3], [(0, 1, 2.0), (1, 2, 0.5)]).unwrap();
        let w = PairWeights::edge_weights(&g);
        let (lhs, rhs) = coarea_sides(&g, &w, &[-1.0, 2.0, 0.5]).unwrap();
        assert!((lhs - 13.5).abs() < 1e-14);
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn area_alpha_one_is_layer_cake() {
        let g = WeightedGraph::new(vec![1.0, 2.0, 0.5], [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let f = [0.3, 1.7, 0.0];
        let a = area_sides(&g, &f, 1.0).unwrap();
        let direct = 0.3 + 2.0 * 1.7;
        assert!((a.sum - direct).abs() < 1e-14);
        assert!((a.integral - direct).abs() < 1e-14);
        assert_eq!(a.sum, a.reciprocal_prefactor_sum);
    }

    #[test]
    fn area_indicator_half() {
        let g = two_vertices();
        let a = area_sides(&g, &[1.0, 0.0], 0.5).unwrap();
        assert!((a.sum - 0.5).abs() < 1e-15);
        assert!((a.integral - 0.5).abs() < 1e-15);
        assert!((a.reciprocal_prefactor_sum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn area_rejects_bad_input() {
        let g = two_vertices();
        assert!(area_sides(&g, &[1.0, 0.0], 0.0).is_err());
        assert!(area_sides(&g, &[1.0, 0.0], 1.5).is_err());
        assert!(area_sides(&g, &[1.0, -0.1], 0.5).is_err());
    }

    #[test]
    fn boundary_weight_counts_orientations() {
        let p = WeightedGraph::new(vec![1.0; 3], [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let w = PairWeights::edge_weights(&p);
        assert_eq!(
            w.boundary_weight(&p, &VertexSet::from_vertices(3, [1])),
            4.0
        );
        assert_eq!(w.boundary_weight(&p, &VertexSet::full(3)), 0.0);
    }
}
