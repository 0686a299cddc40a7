//! Path metrics on weighted graphs: distances, balls, jump size, and the
//! intrinsic condition `Σ_y b(x, y) ρ(x, y)² ≤ m(x)`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::graph::{PairWeights, VertexId, VertexSet, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    /// Edge length `(1/Deg(x) ∧ 1/Deg(y))^{1/2}`.
    Degree,
    /// Unit edge lengths.
    Combinatorial,
    Custom,
}

/// Shortest-path pseudo-metric over nonnegative edge lengths.
///
/// Single-source distance tables are computed on demand and memoized; the memo
/// sits behind a lock, so a metric can be shared across threads.
#[derive(Debug)]
pub struct VertexMetric<'g> {
    graph: &'g WeightedGraph,
    kind: MetricKind,
    lengths: Vec<f64>,
    edge_distances: OnceLock<Vec<f64>>,
    memo: RwLock<HashMap<VertexId, Arc<[f64]>>>,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, VertexId);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'g> VertexMetric<'g> {
    pub fn path_degree(g: &'g WeightedGraph) -> Result<Self> {
        Self::from_edge_lengths(g, MetricKind::Degree, |x, y, _| {
            (1.0 / g.weighted_degree(x))
                .min(1.0 / g.weighted_degree(y))
                .sqrt()
        })
    }

    pub fn combinatorial(g: &'g WeightedGraph) -> Result<Self> {
        Self::from_edge_lengths(g, MetricKind::Combinatorial, |_, _, _| 1.0)
    }

    /// Shortest-path metric for arbitrary nonnegative symmetric edge lengths
    /// `len(x, y, b(x, y))`.
    pub fn custom(
        g: &'g WeightedGraph,
        len: impl FnMut(VertexId, VertexId, f64) -> f64,
    ) -> Result<Self> {
        Self::from_edge_lengths(g, MetricKind::Custom, len)
    }

    fn from_edge_lengths(
        g: &'g WeightedGraph,
        kind: MetricKind,
        mut len: impl FnMut(VertexId, VertexId, f64) -> f64,
    ) -> Result<Self> {
        g.ensure_connected()?;
        let mut lengths = vec![0.0; g.slot_count()];
        for x in 0..g.vertex_count() {
            for s in g.slots(x) {
                let y = g.slot_target(s);
                if y < x {
                    continue;
                }
                let l = len(x, y, g.slot_weight(s));
                if !(l.is_finite() && l >= 0.0) {
                    return Err(Error::Precondition(format!(
                        "edge ({x}, {y}) has invalid length {l}"
                    )));
                }
                lengths[s] = l;
                lengths[g.reverse_slot(s)] = l;
            }
        }
        Ok(Self {
            graph: g,
            kind,
            lengths,
            edge_distances: OnceLock::new(),
            memo: RwLock::new(HashMap::new()),
        })
    }

    /// The same metric multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<VertexMetric<'g>> {
        crate::error::check_param("scale", c, c.is_finite() && c > 0.0, "finite and positive")?;
        Ok(Self {
            graph: self.graph,
            kind: self.kind,
            lengths: self.lengths.iter().map(|l| l * c).collect(),
            edge_distances: OnceLock::new(),
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn edge_length(&self, slot: usize) -> f64 {
        self.lengths[slot]
    }

    fn dijkstra(&self, source: VertexId, cutoff: f64) -> Vec<f64> {
        let g = self.graph;
        let mut dist = vec![f64::INFINITY; g.vertex_count()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Entry(0.0, source));
        while let Some(Entry(d, x)) = heap.pop() {
            if d > dist[x] || d > cutoff {
                continue;
            }
            for s in g.slots(x) {
                let y = g.slot_target(s);
                let nd = d + self.lengths[s];
                if nd < dist[y] {
                    dist[y] = nd;
                    heap.push(Entry(nd, y));
                }
            }
        }
        dist
    }

    /// All distances from `source`.
    pub fn distances_from(&self, source: VertexId) -> Arc<[f64]> {
        if let Some(d) = self.memo.read().unwrap().get(&source) {
            return Arc::clone(d);
        }
        let table: Arc<[f64]> = self.dijkstra(source, f64::INFINITY).into();
        self.memo
            .write()
            .unwrap()
            .entry(source)
            .or_insert(table)
            .clone()
    }

    pub fn distance(&self, x: VertexId, y: VertexId) -> f64 {
        if x == y {
            0.0
        } else {
            self.distances_from(x)[y]
        }
    }

    /// `ρ(x, y)` for every adjacency slot, from Dijkstra runs cut off at the
    /// longest incident edge.
    pub fn edge_distances(&self) -> &[f64] {
        self.edge_distances.get_or_init(|| {
            let g = self.graph;
            let mut out = vec![0.0; g.slot_count()];
            for x in 0..g.vertex_count() {
                let range = g.slots(x);
                let cutoff = self.lengths[range.clone()]
                    .iter()
                    .copied()
                    .fold(0.0, f64::max);
                if range.is_empty() {
                    continue;
                }
                let dist = self.dijkstra(x, cutoff);
                for s in range {
                    out[s] = dist[g.slot_target(s)];
                }
            }
            out
        })
    }

    /// `S = max {ρ(x, y) : b(x, y) > 0}`.
    pub fn jump_size(&self) -> f64 {
        self.edge_distances().iter().copied().fold(0.0, f64::max)
    }

    pub fn verify_intrinsic(&self) -> IntrinsicReport {
        let g = self.graph;
        let rho = self.edge_distances();
        let slacks: Vec<f64> = (0..g.vertex_count())
            .map(|x| {
                let load: f64 = g.slots(x).map(|s| g.slot_weight(s) * rho[s] * rho[s]).sum();
                g.measure(x) - load
            })
            .collect();
        IntrinsicReport { slacks }
    }

    /// `b ρ` as ordered-pair weights.
    pub fn pair_weights(&self) -> PairWeights {
        let rho = self.edge_distances().to_vec();
        let g = self.graph;
        let values = (0..g.slot_count())
            .map(|s| g.slot_weight(s) * rho[s])
            .collect();
        PairWeights::from_slots(g, values).expect("b ρ is finite and nonnegative")
    }

    /// `bρ(∂W) = Σ_{(x, y) ∈ ∂W} b(x, y) ρ(x, y)`.
    pub fn boundary_weight(&self, set: &VertexSet) -> f64 {
        self.pair_weights().boundary_weight(self.graph, set)
    }

    /// Closed (`ρ ≤ r`) or open (`ρ < r`) ball.
    pub fn ball(&self, center: VertexId, radius: f64, closed: bool) -> MetricBall {
        let dist = self.distances_from(center);
        let mask = dist
            .iter()
            .map(|&d| if closed { d <= radius } else { d < radius })
            .collect();
        MetricBall {
            center,
            radius,
            closed,
            members: VertexSet::from_mask(mask),
        }
    }

    /// Closed ball, rejected if any member is on or next to the truncation
    /// frontier of the realization.
    pub fn interior_ball(&self, center: VertexId, radius: f64) -> Result<MetricBall> {
        let ball = self.ball(center, radius, true);
        if ball.members.iter().any(|v| self.graph.near_frontier(v)) {
            return Err(Error::BallTouchesFrontier { center, radius });
        }
        Ok(ball)
    }

    /// Vertices ordered by distance from `center`, ties by index.
    pub fn sorted_by_distance(&self, center: VertexId) -> Vec<(VertexId, f64)> {
        let dist = self.distances_from(center);
        let mut order: Vec<(VertexId, f64)> = dist.iter().copied().enumerate().collect();
        order.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        order
    }
}

#[derive(Clone, Debug)]
pub struct IntrinsicReport {
    /// `m(x) − Σ_y b(x, y) ρ(x, y)²` per vertex.
    pub slacks: Vec<f64>,
}

impl IntrinsicReport {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn worst(&self) -> Option<(VertexId, f64)> {
        self.slacks
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn passes(&self) -> bool {
        self.slacks.iter().all(|&s| s >= -Self::TOLERANCE)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricBall {
    pub center: VertexId,
    pub radius: f64,
    pub closed: bool,
    pub members: VertexSet,
}
