//! Geometric functionals anchored at a vertex: degree and measure means, the
//! error function `Γ`, volume doubling, isoperimetric constants, and Sobolev
//! inequality checks.

use rayon::prelude::*;

use crate::band::PiecewiseConstant;
use crate::error::{check_param, Error, Result};
use crate::graph::{VertexId, VertexSet, WeightedGraph};
use crate::metric::VertexMetric;

/// Exponent `p ∈ (1, ∞]` of the means.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        check_param("p", p, p > 1.0 && p.is_finite(), "1 < p < infinity")?;
        Ok(Self::Finite(p))
    }

    /// `∞` for non-finite input.
    pub fn from_f64(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::Infinite)
        } else {
            Self::finite(p)
        }
    }

    /// Hölder conjugate `q = p/(p − 1)`, with `q = 1` for `p = ∞`.
    pub fn conjugate(self) -> f64 {
        match self {
            Self::Finite(p) => p / (p - 1.0),
            Self::Infinite => 1.0,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Self::Finite(p) => p,
            Self::Infinite => f64::INFINITY,
        }
    }
}

/// `(Σ m g^p / Σ m)^{1/p}`, or `max g` for `p = ∞`, over `members`.
fn power_mean(
    g: &WeightedGraph,
    members: impl Iterator<Item = VertexId>,
    p: Exponent,
    f: impl Fn(VertexId) -> f64,
) -> Result<f64> {
    let mut mass = 0.0;
    let mut acc = 0.0;
    let mut any = false;
    for x in members {
        any = true;
        match p {
            Exponent::Finite(p) => {
                mass += g.measure(x);
                acc += g.measure(x) * f(x).powf(p);
            }
            Exponent::Infinite => acc = f64::max(acc, f(x)),
        }
    }
    if !any {
        return Err(Error::EmptySet);
    }
    Ok(match p {
        Exponent::Finite(p) => (acc / mass).powf(1.0 / p),
        Exponent::Infinite => acc,
    })
}

/// `D_p(o, R)`: the `p`-mean of `Deg` over `B_o(R)` against `m`.
pub fn degree_mean(rho: &VertexMetric<'_>, o: VertexId, radius: f64, p: Exponent) -> Result<f64> {
    let g = rho.graph();
    let ball = rho.interior_ball(o, radius)?;
    power_mean(g, ball.members.iter(), p, |x| g.weighted_degree(x))
}

/// `M_p(o, R)`: the `p`-mean of `1/m` over `B_o(R)` against `m`.
pub fn measure_mean(rho: &VertexMetric<'_>, o: VertexId, radius: f64, p: Exponent) -> Result<f64> {
    let g = rho.graph();
    let ball = rho.interior_ball(o, radius)?;
    power_mean(g, ball.members.iter(), p, |x| 1.0 / g.measure(x))
}

/// `m(B_o(R))` for an interior ball.
pub fn ball_measure(rho: &VertexMetric<'_>, o: VertexId, radius: f64) -> Result<f64> {
    let ball = rho.interior_ball(o, radius)?;
    Ok(rho.graph().total_measure(&ball.members))
}

/// Step function `r ↦ F(B_o(r))` built from the vertices in order of distance,
/// defined for radii whose ball keeps clear of the frontier.
fn ball_profile(
    rho: &VertexMetric<'_>,
    center: VertexId,
    mut fold: impl FnMut(VertexId) -> f64,
) -> PiecewiseConstant {
    let g = rho.graph();
    let order = rho.sorted_by_distance(center);
    let end = order
        .iter()
        .find(|&&(v, _)| g.near_frontier(v))
        .map_or(f64::INFINITY, |&(_, d)| d);
    let pieces: Vec<(f64, f64)> = order
        .iter()
        .take_while(|&&(_, d)| d.is_finite() && d < end)
        .map(|&(v, d)| (d, fold(v)))
        .collect();
    PiecewiseConstant::new(pieces).with_end(end)
}

/// `r ↦ m(B_o(r))`.
pub fn volume_profile(rho: &VertexMetric<'_>, center: VertexId) -> PiecewiseConstant {
    let g = rho.graph();
    let mut mass = 0.0;
    ball_profile(rho, center, |v| {
        mass += g.measure(v);
        mass
    })
}

/// `r ↦ D_p(o, r)`.
pub fn degree_mean_profile(
    rho: &VertexMetric<'_>,
    center: VertexId,
    p: Exponent,
) -> Result<PiecewiseConstant> {
    let g = rho.graph();
    let mut mass = 0.0;
    let mut acc = 0.0;
    Ok(ball_profile(rho, center, |v| {
        let deg = g.weighted_degree(v);
        match p {
            Exponent::Finite(p) => {
                mass += g.measure(v);
                acc += g.measure(v) * deg.powf(p);
                (acc / mass).powf(1.0 / p)
            }
            Exponent::Infinite => {
                acc = f64::max(acc, deg);
                acc
            }
        }
    }))
}

/// Free parameters of `Γ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaParams {
    pub n: f64,
    pub beta: f64,
    /// Jump size `S`.
    pub jump: f64,
}

impl GammaParams {
    /// Requires `n > 2`, `1 < β < 1 + 1/q` and `S > 0`.
    pub fn new(n: f64, beta: f64, jump: f64, p: Exponent) -> Result<Self> {
        check_param("n", n, n > 2.0, "n > 2")?;
        let q = p.conjugate();
        check_param(
            "beta",
            beta,
            beta > 1.0 && beta < 1.0 + 1.0 / q,
            "1 < beta < 1 + 1/q",
        )?;
        check_param(
            "S",
            jump,
            jump > 0.0 && jump.is_finite(),
            "finite and positive",
        )?;
        Ok(Self { n, beta, jump })
    }
}

/// `κ(r) = ⌊√(r/4S) − 2⌋`, negative for small `r`.
pub fn kappa(r: f64, jump: f64) -> i64 {
    ((r / (4.0 * jump)).sqrt() - 2.0).floor() as i64
}

/// `θ(r) = 1/(2β^{κ(r)})`.
pub fn theta(r: f64, beta: f64, jump: f64) -> f64 {
    0.5 / beta.powi(kappa(r, jump) as i32)
}

/// `[(1 + r² D_p) M_p^q m(B)^q]^θ`.
pub fn gamma_from_parts(r: f64, d_p: f64, m_p: f64, volume: f64, q: f64, theta: f64) -> f64 {
    ((1.0 + r * r * d_p) * m_p.powf(q) * volume.powf(q)).powf(theta)
}

/// `Γ(r)` at anchor `o`.
pub fn gamma_error(
    rho: &VertexMetric<'_>,
    o: VertexId,
    r: f64,
    p: Exponent,
    params: &GammaParams,
) -> Result<f64> {
    check_param("r", r, r >= 0.0, "r >= 0")?;
    let d_p = degree_mean(rho, o, r, p)?;
    let m_p = measure_mean(rho, o, r, p)?;
    let volume = ball_measure(rho, o, r)?;
    Ok(gamma_from_parts(
        r,
        d_p,
        m_p,
        volume,
        p.conjugate(),
        theta(r, params.beta, params.jump),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoublingReport {
    /// `max m(B(r₂)) / ((r₂/r₁)^d m(B(r₁)))` over grid pairs `r₁ ≤ r₂`.
    pub c_d: f64,
    pub worst: (f64, f64),
    /// `max m(B(2r))/m(B(r))` over grid radii with `2r ≤ R₂`.
    pub c_d_star: Option<f64>,
}

/// Empirical doubling constants over `grid ∩ [R₁, R₂]`, with `2r` added for every
/// grid radius `r` where `2r ≤ R₂` so that `C*_D ≤ 2^d C_D` holds on the grid.
pub fn doubling_constant(
    rho: &VertexMetric<'_>,
    o: VertexId,
    d: f64,
    r_lo: f64,
    r_hi: f64,
    grid: &[f64],
) -> Result<DoublingReport> {
    check_param("d", d, d > 0.0, "d > 0")?;
    check_param("R1", r_lo, r_lo > 0.0 && r_lo <= r_hi, "0 < R1 <= R2")?;
    rho.interior_ball(o, r_hi)?;
    let profile = volume_profile(rho, o);
    let base: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|r| (r_lo..=r_hi).contains(r))
        .collect();
    if base.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut radii = base.clone();
    radii.extend(base.iter().map(|r| 2.0 * r).filter(|&r| r <= r_hi));
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let volume = |r: f64| profile.eval(r).expect("interior radius");

    let mut c_d = 0.0;
    let mut worst = (radii[0], radii[0]);
    for (i, &a) in radii.iter().enumerate() {
        for &b in &radii[i..] {
            let c = volume(b) / ((b / a).powf(d) * volume(a));
            if c > c_d {
                c_d = c;
                worst = (a, b);
            }
        }
    }
    let c_d_star = base
        .iter()
        .filter(|&&r| 2.0 * r <= r_hi)
        .map(|&r| volume(2.0 * r) / volume(r))
        .reduce(f64::max);
    Ok(DoublingReport {
        c_d,
        worst,
        c_d_star,
    })
}

pub const BRUTE_FORCE_CAP: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoMethod {
    BruteForce,
    Balls,
    Segments,
}

impl IsoMethod {
    pub fn label(self) -> &'static str {
        match self {
            IsoMethod::BruteForce => "brute",
            IsoMethod::Balls => "balls",
            IsoMethod::Segments => "segments",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsoperimetricResult {
    pub value: f64,
    pub set: VertexSet,
    pub method: IsoMethod,
}

/// `(n − 2)/n`, or `1` for `n = ∞`.
pub fn iso_exponent(n: f64) -> Result<f64> {
    check_param("n", n, n > 2.0, "n > 2 (infinity allowed)")?;
    Ok(if n.is_infinite() { 1.0 } else { (n - 2.0) / n })
}

fn iso_ratio(boundary: f64, mass: f64, a: f64) -> f64 {
    boundary.max(0.0) / mass.powf(a)
}

fn finish(
    rho: &VertexMetric<'_>,
    set: VertexSet,
    a: f64,
    method: IsoMethod,
) -> IsoperimetricResult {
    let value = iso_ratio(
        rho.boundary_weight(&set),
        rho.graph().total_measure(&set),
        a,
    );
    IsoperimetricResult { value, set, method }
}

/// Exact `h_{U,n}` by enumerating every nonempty `W ⊆ U` in Gray-code order.
/// Ties go to the smallest membership mask over `U` in increasing vertex order.
pub fn isoperimetric_bruteforce(
    rho: &VertexMetric<'_>,
    u: &VertexSet,
    n: f64,
) -> Result<IsoperimetricResult> {
    let a = iso_exponent(n)?;
    let g = rho.graph();
    let members = u.to_vec();
    let k = members.len();
    if k == 0 {
        return Err(Error::EmptySet);
    }
    if k > BRUTE_FORCE_CAP {
        return Err(Error::SubsetTooLarge {
            size: k,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let pw = rho.pair_weights();
    let mut local = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    // Per member: (neighbour's bit or None when outside U, weight of both orientations).
    let adjacency: Vec<Vec<(Option<usize>, f64)>> = members
        .iter()
        .map(|&v| {
            g.slots(v)
                .map(|s| {
                    let y = g.slot_target(s);
                    let bit = (local[y] != usize::MAX).then_some(local[y]);
                    (bit, pw.slot(s) + pw.slot(g.reverse_slot(s)))
                })
                .collect()
        })
        .collect();
    let measure: Vec<f64> = members.iter().map(|&v| g.measure(v)).collect();

    let total: u64 = 1 << k;
    let chunks: u64 = total.min(64);
    let chunk_len = total / chunks;
    let gray = |i: u64| i ^ (i >> 1);

    let best = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk_len;
            let mut mask = gray(start);
            let mut boundary = 0.0;
            let mut mass = 0.0;
            for i in 0..k {
                if mask >> i & 1 == 1 {
                    mass += measure[i];
                    for &(bit, w) in &adjacency[i] {
                        if bit.is_none_or(|b| mask >> b & 1 == 0) {
                            boundary += w;
                        }
                    }
                }
            }
            let mut best = (f64::INFINITY, u64::MAX);
            let mut consider = |mask: u64, boundary: f64, mass: f64| {
                if mask != 0 {
                    let r = iso_ratio(boundary, mass, a);
                    if r < best.0 || (r == best.0 && mask < best.1) {
                        best = (r, mask);
                    }
                }
            };
            consider(mask, boundary, mass);
            for i in start + 1..start + chunk_len {
                let bit = i.trailing_zeros() as usize;
                let adding = mask >> bit & 1 == 0;
                for &(nb, w) in &adjacency[bit] {
                    let inside = nb.is_some_and(|b| mask >> b & 1 == 1);
                    if inside == adding {
                        boundary -= w;
                    } else {
                        boundary += w;
                    }
                }
                if adding {
                    mass += measure[bit];
                } else {
                    mass -= measure[bit];
                }
                mask ^= 1 << bit;
                consider(mask, boundary, mass);
            }
            best
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |x, y| {
                if y.0 < x.0 || (y.0 == x.0 && y.1 < x.1) {
                    y
                } else {
                    x
                }
            },
        );

    let set = VertexSet::from_vertices(
        g.vertex_count(),
        (0..k).filter(|&i| best.1 >> i & 1 == 1).map(|i| members[i]),
    );
    Ok(finish(rho, set, a, IsoMethod::BruteForce))
}

/// Minimum of the isoperimetric ratio over balls about `center` contained in `u`.
pub fn isoperimetric_balls(
    rho: &VertexMetric<'_>,
    center: VertexId,
    u: &VertexSet,
    n: f64,
) -> Result<IsoperimetricResult> {
    let a = iso_exponent(n)?;
    let g = rho.graph();
    let pw = rho.pair_weights();
    let order = rho.sorted_by_distance(center);
    let mut set = VertexSet::empty(g.vertex_count());
    let mut boundary = 0.0;
    let mut mass = 0.0;
    let mut best: Option<(f64, usize)> = None;
    let mut i = 0;
    while i < order.len() {
        let radius = order[i].1;
        let group: Vec<VertexId> = order[i..]
            .iter()
            .take_while(|&&(_, d)| d == radius)
            .map(|&(v, _)| v)
            .collect();
        if !radius.is_finite() || group.iter().any(|&v| !u.contains(v)) {
            break;
        }
        for &v in &group {
            for s in g.slots(v) {
                let w = pw.slot(s) + pw.slot(g.reverse_slot(s));
                if set.contains(g.slot_target(s)) {
                    boundary -= w;
                } else {
                    boundary += w;
                }
            }
            set.insert(v);
            mass += g.measure(v);
        }
        i += group.len();
        let r = iso_ratio(boundary, mass, a);
        if best.is_none_or(|(b, _)| r < b) {
            best = Some((r, i));
        }
    }
    let (_, count) = best.ok_or(Error::EmptySet)?;
    let set = VertexSet::from_vertices(g.vertex_count(), order[..count].iter().map(|&(v, _)| v));
    Ok(finish(rho, set, a, IsoMethod::Balls))
}

/// Exact `h_{U,n}` on a path graph `0 − 1 − ⋯ − N`, by scanning the intervals
/// contained in `U`. For `(n − 2)/n ≤ 1` a union of separated intervals never
/// beats its best interval: the boundary weight adds up while `m^{(n−2)/n}` is
/// subadditive.
pub fn isoperimetric_segments(
    rho: &VertexMetric<'_>,
    u: &VertexSet,
    n: f64,
) -> Result<IsoperimetricResult> {
    let a = iso_exponent(n)?;
    let g = rho.graph();
    let count = g.vertex_count();
    let is_path = g.edge_count() + 1 == count && g.edges().iter().all(|e| e.v == e.u + 1);
    if !is_path {
        return Err(Error::Precondition(
            "segment enumeration needs the path 0 - 1 - ... - N".into(),
        ));
    }
    if u.is_empty() {
        return Err(Error::EmptySet);
    }
    let pw = rho.pair_weights();
    // cut[k]: both orientations of edge (k, k + 1).
    let cut: Vec<f64> = (0..count.saturating_sub(1))
        .map(|k| {
            let s = g.slot_of(k, k + 1).expect("path edge");
            pw.slot(s) + pw.slot(g.reverse_slot(s))
        })
        .collect();

    let mut best = (f64::INFINITY, 0, 0);
    let mut lo = 0;
    while lo < count {
        if !u.contains(lo) {
            lo += 1;
            continue;
        }
        let mut hi = lo;
        while hi + 1 < count && u.contains(hi + 1) {
            hi += 1;
        }
        for i in lo..=hi {
            let left = if i > 0 { cut[i - 1] } else { 0.0 };
            let mut mass = 0.0;
            for j in i..=hi {
                mass += g.measure(j);
                let right = cut.get(j).copied().unwrap_or(0.0);
                let r = iso_ratio(left + right, mass, a);
                if r < best.0 {
                    best = (r, i, j);
                }
            }
        }
        lo = hi + 1;
    }
    let set = VertexSet::from_vertices(count, best.1..=best.2);
    Ok(finish(rho, set, a, IsoMethod::Segments))
}

fn check_support(f: &[f64], allowed: &VertexSet) -> Result<()> {
    match f
        .iter()
        .enumerate()
        .find(|&(x, &v)| v != 0.0 && !allowed.contains(x))
    {
        Some((x, _)) => Err(Error::SupportViolation(x)),
        None => Ok(()),
    }
}

/// `Σ m |f|^p`.
fn power_sum(g: &WeightedGraph, f: &[f64], p: f64) -> f64 {
    f.iter()
        .enumerate()
        .map(|(x, v)| g.measure(x) * v.abs().powf(p))
        .sum()
}

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + 1e-12 * lhs.abs().max(rhs.abs()).max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevReport {
    /// `(h/C)(Σ m|φ|^{2n/(n−2)})^{(n−2)/n}`.
    pub lhs: f64,
    /// `Σ_{x,y} b (∇φ)² + C^{−2} Σ m φ²`.
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    /// Left side with the factor `n/(n − 2)` inside the power.
    pub inner_factor_lhs: f64,
    pub inner_factor_slack: f64,
}

/// The isoperimetric Sobolev inequality for `φ` supported in `U`, summing
/// over ordered pairs.
pub fn sobolev_check(
    g: &WeightedGraph,
    u: &VertexSet,
    n: f64,
    c: f64,
    h: f64,
    phi: &[f64],
) -> Result<SobolevReport> {
    let a = iso_exponent(n)?;
    check_param("C", c, c > 0.0 && c.is_finite(), "finite and positive")?;
    check_param("h", h, h >= 0.0, "h >= 0")?;
    g.check_len(phi)?;
    check_support(phi, u)?;
    let p = 2.0 / a;
    let inner = power_sum(g, phi, p);
    let lhs = h / c * inner.powf(a);
    let factor = 1.0 / a;
    let inner_factor_lhs = h / c * (factor * inner).powf(a);
    let rhs = 2.0 * g.energy(phi, phi)? + power_sum(g, phi, 2.0) / (c * c);
    Ok(SobolevReport {
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: holds(lhs, rhs),
        inner_factor_lhs,
        inner_factor_slack: rhs - inner_factor_lhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevDefReport {
    /// `m(B(R))^{2/n} ‖u‖²_{2n/(n−2)} / (C_S R²)`.
    pub lhs: f64,
    /// `‖|∇u|‖² + R^{−2}‖u‖²`.
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    /// Smallest `C_S` for which this `u` satisfies the inequality.
    pub implied_constant: f64,
}

/// The scale-weighted Sobolev inequality at radius `R` for `u` supported in
/// the combinatorial interior of `B_o(R)`.
pub fn sobolev_def_check(
    rho: &VertexMetric<'_>,
    o: VertexId,
    n: f64,
    radius: f64,
    c_s: f64,
    u: &[f64],
) -> Result<SobolevDefReport> {
    check_param("n", n, n > 2.0 && n.is_finite(), "2 < n < infinity")?;
    check_param("R", radius, radius > 0.0, "R > 0")?;
    check_param(
        "C_S",
        c_s,
        c_s > 0.0 && c_s.is_finite(),
        "finite and positive",
    )?;
    let g = rho.graph();
    g.check_len(u)?;
    let ball = rho.interior_ball(o, radius)?;
    check_support(u, &g.interior(&ball.members))?;
    let p = 2.0 * n / (n - 2.0);
    let norm_sq = power_sum(g, u, p).powf(2.0 / p);
    let scale = g.total_measure(&ball.members).powf(2.0 / n) / (radius * radius);
    let rhs = 2.0 * g.energy(u, u)? + power_sum(g, u, 2.0) / (radius * radius);
    let lhs = scale * norm_sq / c_s;
    let implied_constant = if rhs > 0.0 {
        scale * norm_sq / rhs
    } else {
        0.0
    };
    Ok(SobolevDefReport {
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: holds(lhs, rhs),
        implied_constant,
    })
}

/// Nonincreasing, nonnegative step function on `[0, ∞)` with compact support:
/// value `values[i]` on `[ends[i − 1], ends[i])`, with `ends[−1] = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    ends: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(pieces: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (ends, values): (Vec<f64>, Vec<f64>) = pieces.into_iter().unzip();
        let increasing = ends.first().is_none_or(|&e| e > 0.0)
            && ends.windows(2).all(|w| w[0] < w[1])
            && ends.iter().all(|e| e.is_finite());
        let decreasing = values.iter().all(|&v| v >= 0.0 && v.is_finite())
            && values.windows(2).all(|w| w[0] >= w[1]);
        if !(increasing && decreasing) {
            return Err(Error::NotDecreasing);
        }
        Ok(Self { ends, values })
    }

    /// `t ↦ m({f > t})` for `f ≥ 0`.
    pub fn distribution(g: &WeightedGraph, f: &[f64]) -> Result<Self> {
        g.check_len(f)?;
        if f.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::NotDecreasing);
        }
        let mut levels: Vec<f64> = f.iter().copied().filter(|&v| v > 0.0).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let pieces = levels.iter().map(|&end| {
            let mass: f64 = (0..f.len())
                .filter(|&x| f[x] >= end)
                .map(|x| g.measure(x))
                .sum();
            (end, mass)
        });
        Self::new(pieces.collect::<Vec<_>>())
    }

    fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.ends.iter().enumerate().map(|(i, &e)| {
            (
                if i == 0 { 0.0 } else { self.ends[i - 1] },
                e,
                self.values[i],
            )
        })
    }
}

/// Both sides of `((1/α)∫ F t^{1/α−1} dt)^α ≤ ∫ F^α dt`, integrated exactly.
pub fn decreasing_inequality_check(f: &StepFunction, alpha: f64) -> Result<(f64, f64)> {
    check_param(
        "alpha",
        alpha,
        alpha > 0.0 && alpha <= 1.0,
        "0 < alpha <= 1",
    )?;
    let power = 1.0 / alpha;
    // (1/α) ∫_a^b t^{1/α−1} dt = b^{1/α} − a^{1/α}
    let inner: f64 = f
        .intervals()
        .map(|(a, b, v)| v * (b.powf(power) - a.powf(power)))
        .sum();
    let rhs = f.intervals().map(|(a, b, v)| v.powf(alpha) * (b - a)).sum();
    Ok((inner.powf(alpha), rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antitree::{reduce, SphereFunction};

    fn two_vertices() -> WeightedGraph {
        WeightedGraph::new(vec![1.0, 1.0], [(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn exponents() {
        assert_eq!(Exponent::finite(2.0).unwrap().conjugate(), 2.0);
        assert_eq!(Exponent::Infinite.conjugate(), 1.0);
        assert!(Exponent::finite(1.0).is_err());
        assert_eq!(
            Exponent::from_f64(f64::INFINITY).unwrap(),
            Exponent::Infinite
        );
    }

    #[test]
    fn means_of_constants() {
        // Cycle of length 6: Deg ≡ 2, m ≡ 1.
        let g = WeightedGraph::new(vec![1.0; 6], (0..6).map(|i| (i, (i + 1) % 6, 1.0))).unwrap();
        let rho = VertexMetric::path_degree(&g).unwrap();
        for p in [
            Exponent::Finite(1.5),
            Exponent::Finite(4.0),
            Exponent::Infinite,
        ] {
            assert!((degree_mean(&rho, 0, 1.0, p).unwrap() - 2.0).abs() < 1e-14);
            assert!((measure_mean(&rho, 0, 1.0, p).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn means_reject_frontier_balls() {
        let line = reduce(&SphereFunction::power(1.0).unwrap(), 4).unwrap();
        let rho = VertexMetric::path_degree(line.graph()).unwrap();
        assert!(degree_mean(&rho, 0, 0.6, Exponent::Infinite).is_ok());
        assert!(degree_mean(&rho, 0, 100.0, Exponent::Infinite).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(kappa(16.0, 1.0), 0);
        assert_eq!(theta(16.0, 1.25, 1.0), 0.5);
        let v = gamma_from_parts(16.0, 1.0, 1.0, 4.0, 1.0, 0.5);
        assert!((v - 1028f64.sqrt()).abs() < 1e-12);
        assert!((v - 32.0624).abs() < 1e-4);
        assert_eq!(gamma_from_parts(0.0, 3.0, 1.0, 1.0, 2.0, 0.3), 1.0);
        assert!(kappa(1.0, 1.0) < 0 && theta(1.0, 1.25, 1.0) > 0.5);
        assert!(GammaParams::new(8.0, 1.6, 1.0, Exponent::Finite(2.0)).is_err());
        assert!(GammaParams::new(8.0, 1.4, 1.0, Exponent::Finite(2.0)).is_ok());
    }

    #[test]
    fn iso_two_vertices() {
        let g = two_vertices();
        let rho = VertexMetric::combinatorial(&g).unwrap();
        let single =
            isoperimetric_bruteforce(&rho, &VertexSet::from_vertices(2, [0]), f64::INFINITY)
                .unwrap();
        assert_eq!(single.value, 2.0);
        assert_eq!(single.set.to_vec(), vec![0]);
        let all = isoperimetric_bruteforce(&rho, &VertexSet::full(2), 4.0).unwrap();
        assert_eq!(all.value, 0.0);
        assert_eq!(all.set.len(), 2);
    }

    #[test]
    fn brute_force_cap() {
        let g = WeightedGraph::new(vec![1.0; 23], (0..22).map(|i| (i, i + 1, 1.0))).unwrap();
        let rho = VertexMetric::combinatorial(&g).unwrap();
        assert!(matches!(
            isoperimetric_bruteforce(&rho, &VertexSet::full(23), 4.0),
            Err(Error::SubsetTooLarge { .. })
        ));
    }

    #[test]
    fn line_methods_agree_with_enumeration() {
        let line = reduce(&SphereFunction::power(1.0).unwrap(), 12).unwrap();
        let rho = VertexMetric::path_degree(line.graph()).unwrap();
        let u = VertexSet::from_vertices(13, 0..7);
        let brute = isoperimetric_bruteforce(&rho, &u, 8.0).unwrap();
        let seg = isoperimetric_segments(&rho, &u, 8.0).unwrap();
        let balls = isoperimetric_balls(&rho, 0, &u, 8.0).unwrap();
        assert!((brute.value - seg.value).abs() <= 1e-12 * brute.value);
        assert!(balls.value >= brute.value);
        assert_eq!(seg.method, IsoMethod::Segments);
    }

    #[test]
    fn sobolev_two_vertex_example() {
        let g = two_vertices();
        let u = VertexSet::from_vertices(2, [0]);
        let r = sobolev_check(&g, &u, 4.0, 1.0, 2.0, &[1.0, 0.0]).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (2.0, 3.0, 1.0));
        assert!(r.holds);
        assert!((r.inner_factor_lhs - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        let zero = sobolev_check(&g, &u, 4.0, 1.0, 2.0, &[0.0, 0.0]).unwrap();
        assert_eq!(zero.slack, 0.0);
        assert!(matches!(
            sobolev_check(&g, &u, 4.0, 1.0, 2.0, &[1.0, 1.0]),
            Err(Error::SupportViolation(1))
        ));
    }

    #[test]
    fn sobolev_definition_scaling() {
        let line = reduce(&SphereFunction::power(1.0).unwrap(), 40).unwrap();
        let rho = VertexMetric::path_degree(line.graph()).unwrap();
        let mut u = vec![0.0; 41];
        u[1] = 0.5;
        u[2] = 1.0;
        let a = sobolev_def_check(&rho, 0, 8.0, 4.0, 1.0, &u).unwrap();
        let scaled: Vec<f64> = u.iter().map(|v| 3.0 * v).collect();
        let b = sobolev_def_check(&rho, 0, 8.0, 4.0, 1.0, &scaled).unwrap();
        assert_eq!(a.holds, b.holds);
        assert!((a.implied_constant - b.implied_constant).abs() < 1e-12 * a.implied_constant);
        let zero = sobolev_def_check(&rho, 0, 8.0, 4.0, 1.0, &[0.0; 41]).unwrap();
        assert_eq!(zero.slack, 0.0);
    }

    #[test]
    fn decreasing_inequality_examples() {
        let ind = StepFunction::new([(1.0, 1.0)]).unwrap();
        for alpha in [0.2, 0.5, 1.0] {
            let (l, r) = decreasing_inequality_check(&ind, alpha).unwrap();
            assert!((l - 1.0).abs() < 1e-14 && (r - 1.0).abs() < 1e-14);
        }
        let f = StepFunction::new([(0.5, 3.0), (2.0, 1.0), (2.5, 0.25)]).unwrap();
        let (l, r) = decreasing_inequality_check(&f, 1.0).unwrap();
        assert!((l - r).abs() < 1e-14);
        let (l, r) = decreasing_inequality_check(&f, 0.5).unwrap();
        assert!(l <= r);
        assert!(StepFunction::new([(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(StepFunction::new([(1.0, 1.0), (0.5, 0.5)]).is_err());
    }

    #[test]
    fn distribution_function() {
        let g = WeightedGraph::new(vec![1.0, 2.0, 3.0], [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let f = StepFunction::distribution(&g, &[0.5, 2.0, 0.0]).unwrap();
        assert_eq!(f, StepFunction::new([(0.5, 3.0), (2.0, 2.0)]).unwrap());
    }

    #[test]
    fn doubling_on_exact_power_volume() {
        // A path has m(B(r)) = 2⌊r⌋ + 1 under the combinatorial metric.
        let g = WeightedGraph::new(vec![1.0; 41], (0..40).map(|i| (i, i + 1, 1.0))).unwrap();
        let rho = VertexMetric::combinatorial(&g).unwrap();
        let grid: Vec<f64> = (1..=8).map(f64::from).collect();
        let rep = doubling_constant(&rho, 20, 1.0, 1.0, 8.0, &grid).unwrap();
        assert_eq!(rep.c_d, 1.0);
        assert!((rep.c_d_star.unwrap() - 17.0 / 9.0).abs() < 1e-12);
        assert!(rep.c_d_star.unwrap() <= 2.0 * rep.c_d);
    }
}
