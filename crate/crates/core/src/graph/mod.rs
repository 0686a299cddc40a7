//! Weighted graphs over a discrete measure space and the operators living on them.
//!
//! A [`WeightedGraph`] is a finite realization: either a genuinely finite graph,
//! or a truncation of an infinite one. Truncations mark their outermost vertices
//! as *frontier*; those vertices are missing edges of the infinite object, so
//! quantities depending on their degree are not trusted downstream.

mod format;
mod levelset;
mod set;

pub use format::{parse_graph, read_graph, write_graph};
pub use levelset::{area_sides, coarea_sides, AreaSides, PairWeights};
pub use set::VertexSet;

use std::collections::VecDeque;
use std::ops::Range;

use crate::error::{Error, Result};

/// Dense vertex index `0..n` within a realization.
pub type VertexId = usize;

/// An undirected edge stored once, with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: f64,
}

/// Symmetric edge weights `b` over a measure `m`, in compressed adjacency form.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    measure: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<f64>,
    /// `reverse[s]` is the slot of the opposite orientation of slot `s`.
    reverse: Vec<usize>,
    edges: Vec<Edge>,
    frontier: Vec<bool>,
}

impl WeightedGraph {
    /// Validates and builds a graph. Edges are unordered pairs; loops, duplicates,
    /// and nonpositive weights or measures are rejected.
    pub fn new(
        measure: Vec<f64>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, f64)>,
    ) -> Result<Self> {
        let n = measure.len();
        for (vertex, &value) in measure.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidMeasure { vertex, value });
            }
        }

        let mut list: Vec<Edge> = Vec::new();
        for (a, b, weight) in edges {
            for vertex in [a, b] {
                if vertex >= n {
                    return Err(Error::VertexOutOfRange { vertex, count: n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidWeight { u: a, v: b, weight });
            }
            list.push(Edge {
                u: a.min(b),
                v: a.max(b),
                weight,
            });
        }
        list.sort_by_key(|a| (a.u, a.v));
        if let Some(w) = list
            .windows(2)
            .find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v))
        {
            return Err(Error::DuplicateEdge(w[0].u, w[0].v));
        }

        let mut counts = vec![0usize; n];
        for e in &list {
            counts[e.u] += 1;
            counts[e.v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + counts[v];
        }
        let mut fill = offsets.clone();
        let slots = offsets[n];
        let mut targets = vec![0; slots];
        let mut weights = vec![0.0; slots];
        let mut reverse = vec![0; slots];
        // Edges are sorted by (u, v), so each adjacency list comes out sorted.
        for e in &list {
            let su = fill[e.u];
            let sv = fill[e.v];
            targets[su] = e.v;
            weights[su] = e.weight;
            targets[sv] = e.u;
            weights[sv] = e.weight;
            reverse[su] = sv;
            reverse[sv] = su;
            fill[e.u] += 1;
            fill[e.v] += 1;
        }
        for v in 0..n {
            let range = offsets[v]..offsets[v + 1];
            debug_assert!(targets[range].windows(2).all(|w| w[0] < w[1]));
        }

        Ok(Self {
            measure,
            offsets,
            targets,
            weights,
            reverse,
            edges: list,
            frontier: vec![false; n],
        })
    }

    /// Marks vertices whose neighbourhood is incomplete because the realization
    /// truncates an infinite graph.
    pub fn with_frontier(mut self, vertices: impl IntoIterator<Item = VertexId>) -> Result<Self> {
        let n = self.vertex_count();
        for v in vertices {
            if v >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    count: n,
                });
            }
            self.frontier[v] = true;
        }
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.measure.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn measure(&self, x: VertexId) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `x` with their edge weights, in increasing vertex order.
    pub fn neighbors(&self, x: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.slots(x)
            .map(move |s| (self.targets[s], self.weights[s]))
    }

    /// Adjacency slots of `x`; each slot is one orientation `(x, y)` of an edge.
    pub fn slots(&self, x: VertexId) -> Range<usize> {
        self.offsets[x]..self.offsets[x + 1]
    }

    pub fn slot_count(&self) -> usize {
        self.targets.len()
    }

    pub fn slot_target(&self, slot: usize) -> VertexId {
        self.targets[slot]
    }

    pub fn slot_weight(&self, slot: usize) -> f64 {
        self.weights[slot]
    }

    pub fn reverse_slot(&self, slot: usize) -> usize {
        self.reverse[slot]
    }

    pub fn slot_of(&self, x: VertexId, y: VertexId) -> Option<usize> {
        let range = self.slots(x);
        let start = range.start;
        self.targets[range]
            .binary_search(&y)
            .ok()
            .map(|i| start + i)
    }

    /// `b(x, y)`, zero for non-adjacent pairs.
    pub fn weight(&self, x: VertexId, y: VertexId) -> f64 {
        self.slot_of(x, y).map_or(0.0, |s| self.weights[s])
    }

    /// Combinatorial degree weighted by `b`: `Σ_y b(x, y)`.
    pub fn degree(&self, x: VertexId) -> f64 {
        self.weights[self.slots(x)].iter().sum()
    }

    /// `Deg(x) = (1/m(x)) Σ_y b(x, y)`.
    pub fn weighted_degree(&self, x: VertexId) -> f64 {
        self.degree(x) / self.measure[x]
    }

    pub fn is_frontier(&self, x: VertexId) -> bool {
        self.frontier[x]
    }

    pub fn has_frontier(&self) -> bool {
        self.frontier.iter().any(|&f| f)
    }

    pub fn frontier(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.frontier
            .iter()
            .enumerate()
            .filter_map(|(v, &f)| f.then_some(v))
    }

    /// True when `x` is a frontier vertex or adjacent to one. Distances and
    /// degrees of vertices outside this zone agree with the infinite object.
    pub fn near_frontier(&self, x: VertexId) -> bool {
        self.frontier[x] || self.neighbors(x).any(|(y, _)| self.frontier[y])
    }

    pub fn total_measure(&self, set: &VertexSet) -> f64 {
        set.iter().map(|v| self.measure[v]).sum()
    }

    /// Connected component label of every vertex, labels dense from 0.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            queue.push_back(start);
            while let Some(x) = queue.pop_front() {
                for s in self.slots(x) {
                    let y = self.targets[s];
                    if label[y] == usize::MAX {
                        label[y] = next;
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    pub fn ensure_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    pub(crate) fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() == self.vertex_count() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                got: f.len(),
                expected: self.vertex_count(),
            })
        }
    }

    /// `Δf(x) = (1/m(x)) Σ_y b(x, y) (f(x) − f(y))`.
    pub fn laplacian_apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        Ok((0..self.vertex_count())
            .map(|x| {
                let flux: f64 = self.neighbors(x).map(|(y, b)| b * (f[x] - f[y])).sum();
                flux / self.measure[x]
            })
            .collect())
    }

    /// `½ Σ_{x,y} b(x, y) ∇_{xy}f ∇_{xy}g`, summing over ordered pairs.
    pub fn energy(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        self.check_len(g)?;
        Ok(self
            .edges
            .iter()
            .map(|e| e.weight * (f[e.u] - f[e.v]) * (g[e.u] - g[e.v]))
            .sum())
    }

    /// `Σ_x m(x) f(x) g(x)`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        self.check_len(g)?;
        Ok(self
            .measure
            .iter()
            .zip(f.iter().zip(g))
            .map(|(m, (a, b))| m * a * b)
            .sum())
    }

    /// Ordered pairs `(x, y)` with exactly one endpoint in `set` and `b(x, y) > 0`.
    pub fn boundary(&self, set: &VertexSet) -> Vec<(VertexId, VertexId)> {
        let mut pairs = Vec::new();
        for x in set.iter() {
            for (y, _) in self.neighbors(x) {
                if !set.contains(y) {
                    pairs.push((x, y));
                    pairs.push((y, x));
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }

    /// Combinatorial interior `{x ∈ A : b(x, y) = 0 for all y ∉ A}`.
    pub fn interior(&self, set: &VertexSet) -> VertexSet {
        VertexSet::from_vertices(
            self.vertex_count(),
            set.iter()
                .filter(|&x| self.neighbors(x).all(|(y, _)| set.contains(y))),
        )
    }

    /// `h(ω) = max_x (1/m(x)) Σ_y b(x, y) |∇_{xy}e^ω ∇_{xy}e^{−ω}|`.
    pub fn h_omega(&self, omega: &[f64]) -> Result<f64> {
        self.check_len(omega)?;
        let mut best = 0.0f64;
        for x in 0..self.vertex_count() {
            let sum: f64 = self
                .neighbors(x)
                .map(|(y, b)| {
                    let d = omega[x] - omega[y];
                    // (e^a − e^b)(e^−a − e^−b) = 2 − 2cosh(a − b)
                    b * 2.0 * (d.cosh() - 1.0)
                })
                .sum();
            best = best.max(sum / self.measure[x]);
        }
        Ok(best)
    }
}
