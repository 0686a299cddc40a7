//! Anti-trees: spheres `S_0, S_1, …` of prescribed sizes, consecutive spheres
//! joined completely, nothing joined inside a sphere. Spherically symmetric
//! questions reduce to a weighted half-line with `m̃(k) = s_k` and
//! `b̃(k, k + 1) = s_k s_{k+1}`.

use std::ops::Range;

use crate::band::{BandReport, PiecewiseConstant};
use crate::error::{check_param, Error, Result};
use crate::functionals::{self, Exponent};
use crate::graph::{VertexId, WeightedGraph};
use crate::metric::VertexMetric;

pub const MAX_FULL_VERTICES: u128 = 200_000;
pub const MAX_FULL_EDGES: u128 = 5_000_000;

/// Sphere sizes `s_k`, with `s_0 = 1` and `s_{−1} = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum SphereFunction {
    /// `s_{k−1} = ⌊k^γ⌋`.
    Power(f64),
    /// Explicit sizes `s_1, s_2, …`; levels past the table are undefined.
    Table(Vec<u64>),
}

impl SphereFunction {
    pub fn power(gamma: f64) -> Result<Self> {
        check_param(
            "gamma",
            gamma,
            (0.0..2.0).contains(&gamma),
            "0 <= gamma < 2",
        )?;
        Ok(Self::Power(gamma))
    }

    pub fn table(sizes: Vec<u64>) -> Result<Self> {
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidParameter {
                name: "sphere size",
                value: (i + 1) as f64,
                expected: "every listed sphere size is at least 1",
            });
        }
        Ok(Self::Table(sizes))
    }

    /// Largest level with a defined size.
    pub fn max_level(&self) -> Option<usize> {
        match self {
            Self::Power(_) => None,
            Self::Table(t) => Some(t.len()),
        }
    }

    pub fn ensure_levels(&self, levels: usize) -> Result<()> {
        match self.max_level() {
            Some(max) if levels > max => Err(Error::Precondition(format!(
                "sphere table defines levels up to {max}, {levels} requested"
            ))),
            _ => Ok(()),
        }
    }

    /// `s_k` for `k ≥ −1`.
    pub fn size(&self, k: i64) -> u64 {
        match k {
            ..=-1 => 0,
            0 => 1,
            _ => match self {
                Self::Power(gamma) => {
                    let p = ((k + 1) as f64).powf(*gamma);
                    let near = p.round();
                    // Exact integer powers such as 4^1.5 must not floor to 7.
                    if (p - near).abs() <= 1e-9 * near {
                        near as u64
                    } else {
                        p.floor() as u64
                    }
                }
                Self::Table(t) => t[k as usize - 1],
            },
        }
    }

    /// `Deg(x)` for `x ∈ S_k` in the infinite anti-tree: `s_{k−1} + s_{k+1}`.
    pub fn degree(&self, k: usize) -> u64 {
        self.size(k as i64 - 1) + self.size(k as i64 + 1)
    }

    /// Length of the path-degree edge between levels `k` and `k + 1` in the
    /// infinite anti-tree.
    pub fn edge_length(&self, k: usize) -> f64 {
        let a = self.degree(k) as f64;
        let b = self.degree(k + 1) as f64;
        (1.0 / a).min(1.0 / b).sqrt()
    }

    /// `ρ(o, x)` for `|x| = 0..=levels` in the infinite anti-tree.
    pub fn root_distances(&self, levels: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(levels + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for k in 0..levels {
            acc += self.edge_length(k);
            out.push(acc);
        }
        out
    }
}

/// `d = 2(γ + 1)/(2 − γ)`.
pub fn dimension(gamma: f64) -> f64 {
    2.0 * (gamma + 1.0) / (2.0 - gamma)
}

/// Truncation depth whose path-degree ball `B_o(radius)` keeps clear of the
/// frontier: if `K` is the last level within `radius`, this is `K + 2`.
pub fn levels_for_radius(s: &SphereFunction, radius: f64) -> Result<usize> {
    check_param(
        "radius",
        radius,
        radius >= 0.0 && radius.is_finite(),
        "finite and >= 0",
    )?;
    let mut acc = 0.0;
    let mut k = 0usize;
    loop {
        s.ensure_levels(k + 2)?;
        let next = acc + s.edge_length(k);
        if next > radius {
            return Ok(k + 2);
        }
        acc = next;
        k += 1;
    }
}

/// A finite anti-tree with levels `0..=N` and unit weights and measure; the
/// last sphere is the truncation frontier.
#[derive(Clone, Debug)]
pub struct AntiTree {
    graph: WeightedGraph,
    level: Vec<usize>,
    starts: Vec<usize>,
}

pub fn build_antitree(s: &SphereFunction, levels: usize) -> Result<AntiTree> {
    check_param("levels", levels as f64, levels >= 1, "at least 1")?;
    s.ensure_levels(levels)?;
    let sizes: Vec<u128> = (0..=levels).map(|k| s.size(k as i64) as u128).collect();
    let vertices: u128 = sizes.iter().sum();
    if vertices > MAX_FULL_VERTICES {
        return Err(Error::RealizationTooLarge {
            what: "vertices",
            count: vertices,
            cap: MAX_FULL_VERTICES,
        });
    }
    let edges: u128 = sizes.windows(2).map(|w| w[0] * w[1]).sum();
    if edges > MAX_FULL_EDGES {
        return Err(Error::RealizationTooLarge {
            what: "edges",
            count: edges,
            cap: MAX_FULL_EDGES,
        });
    }

    let mut starts = Vec::with_capacity(levels + 2);
    let mut level = Vec::with_capacity(vertices as usize);
    let mut at = 0usize;
    for (k, &size) in sizes.iter().enumerate() {
        starts.push(at);
        level.extend(std::iter::repeat_n(k, size as usize));
        at += size as usize;
    }
    starts.push(at);

    let mut list = Vec::with_capacity(edges as usize);
    for k in 0..levels {
        for x in starts[k]..starts[k + 1] {
            for y in starts[k + 1]..starts[k + 2] {
                list.push((x, y, 1.0));
            }
        }
    }
    let graph = WeightedGraph::new(vec![1.0; at], list)?
        .with_frontier(starts[levels]..starts[levels + 1])?;
    Ok(AntiTree {
        graph,
        level,
        starts,
    })
}

impl AntiTree {
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn levels(&self) -> usize {
        self.starts.len() - 2
    }

    pub fn root(&self) -> VertexId {
        0
    }

    /// `|x|`, the sphere index of `x`.
    pub fn level(&self, x: VertexId) -> usize {
        self.level[x]
    }

    pub fn level_map(&self) -> &[usize] {
        &self.level
    }

    /// Vertex ids of `S_k`.
    pub fn sphere(&self, k: usize) -> Range<VertexId> {
        self.starts[k]..self.starts[k + 1]
    }

    /// See [`check_characterization`].
    pub fn check_characterization(
        &self,
        x: VertexId,
        x2: VertexId,
        y: VertexId,
        y2: VertexId,
    ) -> Result<bool> {
        check_characterization(&self.graph, &self.level, x, x2, y, y2)
    }
}

/// Whether the map exchanging `x ↔ x'` and `y ↔ y'` and fixing everything else
/// preserves weights and measure. Requires `|x| = |x'|`, `|y| = |y'|`, and the
/// two swaps must either coincide or be disjoint.
pub fn check_characterization(
    g: &WeightedGraph,
    level: &[usize],
    x: VertexId,
    x2: VertexId,
    y: VertexId,
    y2: VertexId,
) -> Result<bool> {
    let n = g.vertex_count();
    for v in [x, x2, y, y2] {
        if v >= n {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                count: n,
            });
        }
    }
    if level[x] != level[x2] || level[y] != level[y2] {
        return Err(Error::Precondition(
            "swapped vertices must lie in the same sphere".into(),
        ));
    }
    let same = (x == y && x2 == y2) || (x == y2 && x2 == y);
    let first: &[VertexId] = if x == x2 { &[] } else { &[x, x2] };
    let second: &[VertexId] = if y == y2 { &[] } else { &[y, y2] };
    if !same && first.iter().any(|v| second.contains(v)) {
        return Err(Error::Precondition(
            "overlapping transpositions do not define a permutation".into(),
        ));
    }

    let map = |v: VertexId| -> VertexId {
        if v == x {
            x2
        } else if v == x2 {
            x
        } else if same {
            v
        } else if v == y {
            y2
        } else if v == y2 {
            y
        } else {
            v
        }
    };
    for v in [x, x2, y, y2] {
        if g.measure(v) != g.measure(map(v)) {
            return Ok(false);
        }
    }
    Ok(g.edges()
        .iter()
        .all(|e| g.weight(map(e.u), map(e.v)) == e.weight))
}

/// The weighted half-line `{0, …, N}` with `m̃(k) = s_k`, `b̃(k, k+1) = s_k s_{k+1}`;
/// level `N` is the frontier.
#[derive(Clone, Debug)]
pub struct ReducedLine {
    graph: WeightedGraph,
}

pub fn reduce(s: &SphereFunction, levels: usize) -> Result<ReducedLine> {
    check_param("levels", levels as f64, levels >= 1, "at least 1")?;
    s.ensure_levels(levels)?;
    let sizes: Vec<f64> = (0..=levels).map(|k| s.size(k as i64) as f64).collect();
    let edges = (0..levels).map(|k| (k, k + 1, sizes[k] * sizes[k + 1]));
    let graph = WeightedGraph::new(sizes.clone(), edges)?.with_frontier([levels])?;
    Ok(ReducedLine { graph })
}

impl ReducedLine {
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn levels(&self) -> usize {
        self.graph.vertex_count() - 1
    }
}

/// Band of `ρ(o, x)/|x|^{(2−γ)/2}` over integer `|x| ∈ [k0, k1]`, `k0 ≥ 1`.
pub fn distance_band(gamma: f64, k0: usize, k1: usize) -> Result<BandReport> {
    let s = SphereFunction::power(gamma)?;
    check_param("k0", k0 as f64, k0 >= 1 && k0 <= k1, "1 <= k0 <= k1")?;
    let line = reduce(&s, k1 + 2)?;
    let rho = VertexMetric::path_degree(line.graph())?;
    let dist = rho.distances_from(0);
    let e = (2.0 - gamma) / 2.0;
    BandReport::from_samples((k0..=k1).map(|k| (k as f64, dist[k] / (k as f64).powf(e))))
        .ok_or(Error::EmptySet)
}

/// Reduced line deep enough that the ball of radius `radius` about level
/// `center` is interior, with its path-degree metric distances from `center`.
fn line_for_ball(s: &SphereFunction, center: usize, radius: f64) -> Result<ReducedLine> {
    let reach = s.root_distances(center)[center] + radius;
    let levels = levels_for_radius(s, reach)?.max(center + 2);
    reduce(s, levels)
}

/// Band of `m(B_x(r))/r^d` for `r ∈ [r0, r1]`, `|x| = center`, evaluated exactly
/// from the step function `r ↦ m̃(B̃_{|x|}(r))`.
pub fn volume_band(gamma: f64, center: usize, r0: f64, r1: f64) -> Result<BandReport> {
    let s = SphereFunction::power(gamma)?;
    check_param("r0", r0, r0 > 0.0 && r0 <= r1, "0 < r0 <= r1")?;
    let line = line_for_ball(&s, center, r1)?;
    let rho = VertexMetric::path_degree(line.graph())?;
    let profile = functionals::volume_profile(&rho, center);
    let d = dimension(gamma);
    profile
        .band(r0, r1, |v, r| v / r.powf(d))
        .ok_or(Error::EmptySet)
}

/// Band of `D_p(o, r)/r^{2γ/(2−γ)}` for `r ∈ [r0, r1]`.
pub fn degree_band(gamma: f64, p: Exponent, r0: f64, r1: f64) -> Result<BandReport> {
    let s = SphereFunction::power(gamma)?;
    check_param("r0", r0, r0 > 0.0 && r0 <= r1, "0 < r0 <= r1")?;
    let line = line_for_ball(&s, 0, r1)?;
    let rho = VertexMetric::path_degree(line.graph())?;
    let profile: PiecewiseConstant = functionals::degree_mean_profile(&rho, 0, p)?;
    let e = 2.0 * gamma / (2.0 - gamma);
    profile
        .band(r0, r1, |v, r| v / r.powf(e))
        .ok_or(Error::EmptySet)
}
