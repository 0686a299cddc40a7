//! Gaussian factors `ζ_S`, `σ`, the anchored upper bound and its anti-tree
//! specializations, and kernel-versus-bound ratio reports.

use std::collections::BTreeMap;

use crate::antitree::dimension;
use crate::error::{check_param, Result};
use crate::functionals::Exponent;
use crate::graph::VertexId;

/// Time threshold `2·72²` of the anchored anti-tree bound.
pub const ANTITREE_TIME: f64 = 2.0 * 72.0 * 72.0;
/// Radius `R₀` of the two-point anti-tree bound.
pub const ANTITREE2_R0: f64 = 72.0;

/// `√(t² + a²) − t` without cancellation.
fn excess(t: f64, a: f64) -> f64 {
    a * a / ((t * t + a * a).sqrt() + t)
}

fn check_time(t: f64) -> Result<()> {
    check_param("t", t, t > 0.0 && t.is_finite(), "t > 0")
}

/// `ζ_S(r, t) = S^{−2}(rS arsinh(rS/t) + t − √(t² + r²S²))`.
pub fn zeta(r: f64, t: f64, s: f64) -> Result<f64> {
    check_time(t)?;
    check_param("r", r, r >= 0.0, "r >= 0")?;
    check_param("S", s, s > 0.0 && s.is_finite(), "S > 0")?;
    let a = r * s;
    Ok(((a * (a / t).asinh() - excess(t, a)) / (s * s)).max(0.0))
}

/// `σ(r, t) = 2S^{−2}(√(1 + r²S²/t²) − 1)`.
pub fn sigma(r: f64, t: f64, s: f64) -> Result<f64> {
    check_time(t)?;
    check_param("S", s, s > 0.0 && s.is_finite(), "S > 0")?;
    let u = r * s / t;
    Ok(2.0 * u * u / ((1.0 + u * u).sqrt() + 1.0) / (s * s))
}

/// Named precondition checks attached to a bound value. Violations flag the
/// value without suppressing it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Preconditions {
    checks: Vec<(&'static str, bool)>,
}

impl Preconditions {
    pub fn check(&mut self, name: &'static str, ok: bool) -> &mut Self {
        self.checks.push((name, ok));
        self
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|&(_, ok)| ok)
    }

    pub fn failed(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.iter().filter(|c| !c.1).map(|c| c.0)
    }

    pub fn checks(&self) -> &[(&'static str, bool)] {
        &self.checks
    }

    /// `ok`, or the failed check names joined by `|`.
    pub fn flags(&self) -> String {
        if self.ok() {
            "ok".into()
        } else {
            self.failed().collect::<Vec<_>>().join("|")
        }
    }

    pub fn merge(&mut self, other: &Preconditions) {
        self.checks.extend_from_slice(&other.checks);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundValue {
    pub value: f64,
    pub preconditions: Preconditions,
}

/// Parameters of the anchored bound. `c_free` stands for the analytic constant
/// that is not known numerically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub n: f64,
    pub d: f64,
    pub p: Exponent,
    pub jump: f64,
    pub r1: f64,
    pub r2: f64,
    pub lambda: f64,
    pub c_doubling: f64,
    pub c_free: f64,
}

impl BoundParams {
    pub fn new(n: f64, d: f64, p: Exponent, jump: f64, r1: f64, r2: f64) -> Result<Self> {
        check_param("n", n, n > 2.0 && n.is_finite(), "2 < n < infinity")?;
        check_param("d", d, d > 0.0 && d.is_finite(), "d > 0")?;
        check_param("S", jump, jump > 0.0 && jump.is_finite(), "S > 0")?;
        check_param("R1", r1, r1 > 0.0, "R1 > 0")?;
        check_param("R2", r2, r2 > 0.0, "R2 > 0")?;
        Ok(Self {
            n,
            d,
            p,
            jump,
            r1,
            r2,
            lambda: 0.0,
            c_doubling: 1.0,
            c_free: 1.0,
        })
    }

    pub fn q(&self) -> f64 {
        self.p.conjugate()
    }

    pub fn alpha(&self) -> f64 {
        1.0 + 2.0 / self.n
    }

    /// `1 + 1/(n ∨ 2q)`, which lies in `(1, 1 + 1/q)` and below `α`.
    pub fn beta(&self) -> f64 {
        1.0 + 1.0 / self.n.max(2.0 * self.q())
    }

    /// `32S(ln q / ln(α/β) + 3)²`.
    pub fn radius_threshold(&self) -> f64 {
        let k = self.q().ln() / (self.alpha() / self.beta()).ln() + 3.0;
        32.0 * self.jump * k * k
    }

    /// `R₂ ≥ 4R₁ ≥ 32S(ln q / ln(α/β) + 3)²`.
    pub fn radii_admissible(&self) -> bool {
        self.r2 >= 4.0 * self.r1 && 4.0 * self.r1 >= self.radius_threshold()
    }

    /// `2^{3n+2d+2} e C_free C_D`.
    pub fn constant(&self) -> f64 {
        (3.0 * self.n + 2.0 * self.d + 2.0).exp2()
            * std::f64::consts::E
            * self.c_free
            * self.c_doubling
    }

    /// `r(t, x) = ρ(o, x) + (√(t/2) ∧ R₂/4)`.
    pub fn anchor_radius(&self, t: f64, rho_ox: f64) -> f64 {
        rho_ox + (t / 2.0).sqrt().min(self.r2 / 4.0)
    }

    /// `√t ∧ R₂`, the radius of the normalizing ball.
    pub fn volume_radius(&self, t: f64) -> f64 {
        t.sqrt().min(self.r2)
    }
}

/// Geometric inputs of the anchored bound at a pair `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnchoredGeometry {
    /// `Γ(r(t, x))` and `Γ(r(t, y))`.
    pub gamma_x: f64,
    pub gamma_y: f64,
    pub rho_ox: f64,
    pub rho_oy: f64,
    pub rho_xy: f64,
    /// `m(B_o(√t ∧ R₂))`.
    pub volume: f64,
}

/// `(1 ∨ S^{−2}(√(t² + r²S²) − t))^e`.
fn polynomial_factor(r: f64, t: f64, s: f64, e: f64) -> f64 {
    (excess(t, r * s) / (s * s)).max(1.0).powf(e)
}

/// Right-hand side of the anchored Gaussian upper bound.
pub fn anchored_bound(
    params: &BoundParams,
    geometry: &AnchoredGeometry,
    t: f64,
) -> Result<BoundValue> {
    check_time(t)?;
    let BoundParams {
        n,
        jump,
        r1,
        r2,
        lambda,
        ..
    } = *params;
    let mut pre = Preconditions::default();
    pre.check("radii", params.radii_admissible())
        .check("time", t >= 2.0 * r1 * r1)
        .check("x_in_ball", geometry.rho_ox <= r2 / 4.0)
        .check("y_in_ball", geometry.rho_oy <= r2 / 4.0);
    let capped = t.min(r2 * r2);
    let spread = (1.0 + (geometry.rho_ox.powi(2) + geometry.rho_oy.powi(2)) / capped).powf(n / 2.0);
    let gauss = (-lambda * (t - capped) - zeta(geometry.rho_xy, t, jump)?).exp();
    let value = params.constant()
        * geometry.gamma_x
        * geometry.gamma_y
        * spread
        * polynomial_factor(geometry.rho_xy, t, jump, n / 2.0)
        / geometry.volume
        * gauss;
    Ok(BoundValue {
        value,
        preconditions: pre,
    })
}

/// Inputs of the anchored anti-tree bound in the intrinsic metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntrinsicInput {
    pub gamma: f64,
    pub n: f64,
    /// Exponent of the two polynomial factors; `n/2` when `None`.
    pub exponent: Option<f64>,
    pub rho_ox: f64,
    pub rho_oy: f64,
    pub rho_xy: f64,
    /// `m(B_o(√t))`.
    pub volume: f64,
    /// `|x| ≠ |y|` or `x = y`.
    pub pair_admissible: bool,
}

/// `C(1 + (ρ(o,x)² + ρ(o,y)²)/t)^e (1 ∨ (√(t² + ρ(x,y)²) − t))^e e^{−ζ₁(ρ(x,y),t)} / m(B_o(√t))`.
pub fn antitree_bound_intrinsic(input: &IntrinsicInput, t: f64, c_free: f64) -> Result<BoundValue> {
    check_time(t)?;
    let e = input.exponent.unwrap_or(input.n / 2.0);
    let mut pre = Preconditions::default();
    pre.check("time", t >= ANTITREE_TIME)
        .check("pair", input.pair_admissible)
        .check("n_ge_2d", input.n >= 2.0 * dimension(input.gamma));
    let spread = (1.0 + (input.rho_ox.powi(2) + input.rho_oy.powi(2)) / t).powf(e);
    let value = c_free * spread * polynomial_factor(input.rho_xy, t, 1.0, e) / input.volume
        * (-zeta(input.rho_xy, t, 1.0)?).exp();
    Ok(BoundValue {
        value,
        preconditions: pre,
    })
}

/// `C(1 + (|x|^{2(γ+1)} + |y|^{2(γ+1)})/t^d) t^{−d/2} e^{−||x|−|y||^{2−γ}/(C't)}`
/// with `C' = C` unless given separately.
pub fn antitree_bound_combinatorial(
    gamma: f64,
    level_x: u64,
    level_y: u64,
    t: f64,
    c_free: f64,
    c_exponent: Option<f64>,
) -> Result<BoundValue> {
    check_time(t)?;
    let d = dimension(gamma);
    let (lx, ly) = (level_x as f64, level_y as f64);
    let gap = (lx - ly).abs();
    let mut pre = Preconditions::default();
    pre.check(
        "time",
        t > 2.0 * gap.powf(2.0 - gamma).max(gap.powf((2.0 - gamma) / 2.0)),
    );
    let c_exp = c_exponent.unwrap_or(c_free);
    let k = 2.0 * (gamma + 1.0);
    let value = c_free * (1.0 + (lx.powf(k) + ly.powf(k)) / t.powf(d)) / t.powf(d / 2.0)
        * (-gap.powf(2.0 - gamma) / (c_exp * t)).exp();
    Ok(BoundValue {
        value,
        preconditions: pre,
    })
}

/// Inputs of the two-point anti-tree bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPointInput {
    pub gamma: f64,
    pub n: f64,
    pub rho_ox: f64,
    pub rho_oy: f64,
    pub rho_xy: f64,
    /// `m(B_x(√t))` and `m(B_y(√t))`.
    pub volume_x: f64,
    pub volume_y: f64,
}

/// `C(1 ∨ (√(t² + ρ(x,y)²) − t))^{n/2} e^{−ζ₁(ρ(x,y),t)} / √(m(B_x(√t)) m(B_y(√t)))`.
pub fn antitree2_bound(input: &TwoPointInput, t: f64, c_free: f64) -> Result<BoundValue> {
    check_time(t)?;
    let reach = input.rho_ox.max(input.rho_oy).max(ANTITREE2_R0);
    let mut pre = Preconditions::default();
    pre.check("time", t >= 8.0 * reach * reach)
        .check("n_ge_2d", input.n >= 2.0 * dimension(input.gamma));
    let value = c_free * polynomial_factor(input.rho_xy, t, 1.0, input.n / 2.0)
        / (input.volume_x * input.volume_y).sqrt()
        * (-zeta(input.rho_xy, t, 1.0)?).exp();
    Ok(BoundValue {
        value,
        preconditions: pre,
    })
}

/// One grid point of a ratio report. `kernel` is `None` when the exhaustion
/// did not converge.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioInput {
    pub t: f64,
    pub x: VertexId,
    pub y: VertexId,
    pub kernel: Option<f64>,
    pub shape: BoundValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub t: f64,
    pub x: VertexId,
    pub y: VertexId,
    pub kernel: f64,
    pub shape: f64,
    pub ratio: f64,
    pub flags: String,
}

/// Supremum of the ratio within a group of grid points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupSup {
    pub key: f64,
    pub sup: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    pub excluded: usize,
    pub sup: f64,
    pub argmax: Option<(f64, VertexId, VertexId)>,
    /// Per-time suprema in increasing `t`.
    pub per_time: Vec<GroupSup>,
    /// Per-decade suprema keyed by `⌊log₁₀ t⌋`.
    pub per_decade: Vec<GroupSup>,
    pub flagged: usize,
}

fn stability(groups: &[GroupSup]) -> Option<f64> {
    let max = groups.iter().map(|g| g.sup).reduce(f64::max)?;
    let min = groups.iter().map(|g| g.sup).reduce(f64::min)?;
    Some(max / min)
}

impl RatioReport {
    /// `max/min` of the per-time suprema.
    pub fn time_stability(&self) -> Option<f64> {
        stability(&self.per_time)
    }

    /// `max/min` of the per-decade suprema.
    pub fn decade_stability(&self) -> Option<f64> {
        stability(&self.per_decade)
    }

    /// Supremum at the largest time over supremum at the smallest.
    pub fn growth(&self) -> Option<f64> {
        Some(self.per_time.last()?.sup / self.per_time.first()?.sup)
    }
}

fn group_sups(rows: &[RatioRow], key: impl Fn(f64) -> f64) -> Vec<GroupSup> {
    let mut groups: BTreeMap<u64, GroupSup> = BTreeMap::new();
    for row in rows {
        let k = key(row.t);
        // Order-preserving bits for the nonnegative keys used here.
        let entry = groups
            .entry(k.to_bits())
            .or_insert(GroupSup { key: k, sup: 0.0 });
        entry.sup = entry.sup.max(row.ratio);
    }
    groups.into_values().collect()
}

/// Elementwise `p/shape` with suprema overall, per time and per decade.
pub fn ratio_report(inputs: impl IntoIterator<Item = RatioInput>) -> RatioReport {
    let mut rows = Vec::new();
    let mut excluded = 0;
    for input in inputs {
        match input.kernel {
            Some(kernel) => rows.push(RatioRow {
                t: input.t,
                x: input.x,
                y: input.y,
                kernel,
                shape: input.shape.value,
                ratio: kernel / input.shape.value,
                flags: input.shape.preconditions.flags(),
            }),
            None => excluded += 1,
        }
    }
    let mut sup = 0.0;
    let mut argmax = None;
    for row in &rows {
        if row.ratio > sup || argmax.is_none() {
            sup = row.ratio;
            argmax = Some((row.t, row.x, row.y));
        }
    }
    let per_time = group_sups(&rows, |t| t);
    let per_decade = group_sups(&rows, |t| t.log10().floor().max(0.0));
    let flagged = rows.iter().filter(|r| r.flags != "ok").count();
    RatioReport {
        rows,
        excluded,
        sup,
        argmax,
        per_time,
        per_decade,
        flagged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta(0.0, 3.0, 1.0).unwrap(), 0.0);
        let want = 1f64.asinh() + 1.0 - 2f64.sqrt();
        assert!((zeta(1.0, 1.0, 1.0).unwrap() - want).abs() < 1e-15);
        assert!((zeta(1.0, 1.0, 1.0).unwrap() - 0.4672).abs() < 1e-4);
        let r = zeta(5.0, 1e4, 1.0).unwrap() * 2e4 / 25.0;
        assert!((r - 1.0).abs() < 1e-3);
        assert!(zeta(1.0, 0.0, 1.0).is_err());
        assert!(zeta(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn zeta_is_stable_for_large_times() {
        // Series: ζ₁ = r²/(2t) − r⁴/(24t³) + ...
        let (r, t): (f64, f64) = (1.0, 1e9);
        let series = r * r / (2.0 * t) - r.powi(4) / (24.0 * t.powi(3));
        assert!((zeta(r, t, 1.0).unwrap() / series - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(0.0, 2.0, 1.0).unwrap(), 0.0);
        assert!((sigma(3.0, 3.0, 1.0).unwrap() - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(sigma(1.0, 0.0, 1.0).is_err());
    }

    fn params() -> BoundParams {
        BoundParams::new(4.0, 2.0, Exponent::Infinite, 1.0, 72.0, 1e4).unwrap()
    }

    #[test]
    fn radius_condition() {
        let p = params();
        assert_eq!(p.q(), 1.0);
        assert_eq!(p.radius_threshold(), 288.0);
        assert!(p.radii_admissible());
        let mut small = p;
        small.r1 = 71.9;
        assert!(!small.radii_admissible());
        let mut finite = p;
        finite.p = Exponent::Finite(2.0);
        assert!(finite.alpha() > finite.beta());
        assert!(finite.radius_threshold() > 288.0);
    }

    #[test]
    fn anchored_collapses_at_anchor() {
        let p = params();
        let geo = AnchoredGeometry {
            gamma_x: 2.0,
            gamma_y: 2.0,
            rho_ox: 0.0,
            rho_oy: 0.0,
            rho_xy: 0.0,
            volume: 5.0,
        };
        let b = anchored_bound(&p, &geo, 2.0 * 72.0 * 72.0).unwrap();
        assert!(b.preconditions.ok());
        assert!((b.value - p.constant() * 4.0 / 5.0).abs() <= 1e-12 * b.value);
        let early = anchored_bound(&p, &geo, 100.0).unwrap();
        assert_eq!(early.preconditions.flags(), "time");
    }

    #[test]
    fn anchored_lambda_factor_beyond_r2() {
        let mut p = params();
        p.r2 = 300.0;
        p.lambda = 1e-5;
        let geo = AnchoredGeometry {
            gamma_x: 1.0,
            gamma_y: 1.0,
            rho_ox: 0.0,
            rho_oy: 0.0,
            rho_xy: 0.0,
            volume: 1.0,
        };
        let inside = anchored_bound(&p, &geo, 9e4).unwrap().value;
        assert_eq!(inside, p.constant());
        let outside = anchored_bound(&p, &geo, 1e5).unwrap().value;
        assert!((outside / p.constant() - (-0.1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn antitree_thresholds() {
        assert_eq!(ANTITREE_TIME, 10368.0);
        let input = TwoPointInput {
            gamma: 0.5,
            n: 4.0,
            rho_ox: 0.0,
            rho_oy: 0.0,
            rho_xy: 0.0,
            volume_x: 3.0,
            volume_y: 3.0,
        };
        let b = antitree2_bound(&input, 41472.0, 1.0).unwrap();
        assert!(b.preconditions.ok());
        assert!((b.value - 1.0 / 3.0).abs() < 1e-15);
        assert!(!antitree2_bound(&input, 41471.0, 1.0)
            .unwrap()
            .preconditions
            .ok());
    }

    #[test]
    fn intrinsic_collapse() {
        let input = IntrinsicInput {
            gamma: 0.5,
            n: 2.0 * dimension(0.5),
            exponent: None,
            rho_ox: 0.0,
            rho_oy: 0.0,
            rho_xy: 0.0,
            volume: 7.0,
            pair_admissible: true,
        };
        let b = antitree_bound_intrinsic(&input, 2e4, 2.0).unwrap();
        assert!(b.preconditions.ok());
        assert_eq!(b.value, 2.0 / 7.0);
    }

    #[test]
    fn combinatorial_on_diagonal_decay() {
        let a = antitree_bound_combinatorial(1.0, 0, 0, 100.0, 1.0, None)
            .unwrap()
            .value;
        let b = antitree_bound_combinatorial(1.0, 0, 0, 200.0, 1.0, None)
            .unwrap()
            .value;
        assert!((a / b - 4.0).abs() < 1e-9);
        let same = antitree_bound_combinatorial(1.0, 3, 3, 50.0, 1.0, None).unwrap();
        let expected = (1.0 + 2.0 * 3f64.powi(4) / 50f64.powi(4)) / 50f64.powi(2);
        assert!((same.value - expected).abs() < 1e-15);
        let early = antitree_bound_combinatorial(1.0, 0, 9, 10.0, 1.0, None).unwrap();
        assert!(!early.preconditions.ok());
    }

    #[test]
    fn ratio_report_summary() {
        let shape = |v: f64| BoundValue {
            value: v,
            preconditions: Preconditions::default(),
        };
        let inputs = vec![
            RatioInput {
                t: 1.0,
                x: 0,
                y: 0,
                kernel: Some(1.0),
                shape: shape(2.0),
            },
            RatioInput {
                t: 1.0,
                x: 0,
                y: 1,
                kernel: Some(0.5),
                shape: shape(0.5),
            },
            RatioInput {
                t: 20.0,
                x: 0,
                y: 0,
                kernel: Some(0.25),
                shape: shape(0.5),
            },
            RatioInput {
                t: 30.0,
                x: 0,
                y: 0,
                kernel: None,
                shape: shape(0.5),
            },
        ];
        let r = ratio_report(inputs);
        assert_eq!(r.excluded, 1);
        assert_eq!(r.sup, 1.0);
        assert_eq!(r.argmax, Some((1.0, 0, 1)));
        assert_eq!(r.time_stability(), Some(2.0));
        assert_eq!(r.decade_stability(), Some(2.0));
        assert_eq!(r.growth(), Some(0.5));
        assert!(r.rows.iter().all(|row| row.ratio <= r.sup));
    }
}
