//! Dirichlet heat kernels on finite vertex sets.
//!
//! On a finite set `A` the generator is the symmetric matrix
//! `L = M^{−1/2}(D − B)M^{−1/2}` restricted to `A`, where `D` keeps the full row
//! sums of `b` (edges leaving `A` still count). Then
//! `p^A_t(x, y) = Σ_j e^{−tλ_j} u_j(x) u_j(y) / √(m(x) m(y))`,
//! which increases to the minimal heat kernel as `A` exhausts the graph.

use faer::{Mat, Side};
use rayon::prelude::*;

use crate::error::{check_param, Error, Result};
use crate::graph::{VertexId, VertexSet, WeightedGraph};
use crate::metric::VertexMetric;

/// Kernel values in `[−CLAMP, 0)` are rounding noise and reported as zero.
pub const CLAMP: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct DirichletGenerator {
    domain: Vec<VertexId>,
    sqrt_measure: Vec<f64>,
    matrix: Mat<f64>,
    universe: usize,
}

pub fn assemble_dirichlet(g: &WeightedGraph, domain: &VertexSet) -> Result<DirichletGenerator> {
    if domain.is_empty() {
        return Err(Error::EmptySet);
    }
    if domain.universe() != g.vertex_count() {
        return Err(Error::LengthMismatch {
            got: domain.universe(),
            expected: g.vertex_count(),
        });
    }
    let vertices = domain.to_vec();
    let mut index = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        index[v] = i;
    }
    let sqrt_measure: Vec<f64> = vertices.iter().map(|&v| g.measure(v).sqrt()).collect();
    let n = vertices.len();
    let mut matrix = Mat::<f64>::zeros(n, n);
    for (i, &x) in vertices.iter().enumerate() {
        matrix[(i, i)] = g.weighted_degree(x);
        for (y, b) in g.neighbors(x) {
            let j = index[y];
            if j != usize::MAX {
                matrix[(i, j)] = -b / (sqrt_measure[i] * sqrt_measure[j]);
            }
        }
    }
    Ok(DirichletGenerator {
        domain: vertices,
        sqrt_measure,
        matrix,
        universe: g.vertex_count(),
    })
}

impl DirichletGenerator {
    pub fn domain(&self) -> &[VertexId] {
        &self.domain
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn decompose(&self) -> Result<SpectralDecomposition> {
        let eig = self
            .matrix
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let n = self.domain.len();
        let s = eig.S().column_vector();
        let u = eig.U();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&j| s[j]).collect();
        let mut vectors = vec![0.0; n * n];
        for i in 0..n {
            for (k, &j) in order.iter().enumerate() {
                vectors[i * n + k] = u[(i, j)];
            }
        }
        Ok(SpectralDecomposition {
            eigenvalues,
            vectors,
            n,
        })
    }

    /// Eigenvalues only, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut values = self
            .matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        values.sort_by(f64::total_cmp);
        Ok(values)
    }
}

/// Eigenpairs of a generator; `vectors` is row-major with row `i` holding the
/// `i`-th coordinate of every eigenvector.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: Vec<f64>,
    n: usize,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `u_j(i)`.
    pub fn vector_entry(&self, i: usize, j: usize) -> f64 {
        self.vectors[i * self.n + j]
    }

    /// `‖L − UΛUᵀ‖_F / ‖L‖_F`.
    pub fn reconstruction_residual(&self, generator: &DirichletGenerator) -> f64 {
        let n = self.n;
        let l = &generator.matrix;
        let mut diff = 0.0;
        let mut norm = 0.0;
        for i in 0..n {
            let ri = &self.vectors[i * n..(i + 1) * n];
            for k in 0..n {
                let rk = &self.vectors[k * n..(k + 1) * n];
                let rebuilt: f64 = (0..n).map(|j| ri[j] * self.eigenvalues[j] * rk[j]).sum();
                diff += (l[(i, k)] - rebuilt).powi(2);
                norm += l[(i, k)].powi(2);
            }
        }
        if norm == 0.0 {
            diff.sqrt()
        } else {
            (diff / norm).sqrt()
        }
    }
}

/// Evaluator of `p^A_t(x, y)` for one Dirichlet domain `A`.
#[derive(Clone, Debug)]
pub struct HeatKernel {
    domain: Vec<VertexId>,
    index: Vec<usize>,
    sqrt_measure: Vec<f64>,
    spectrum: SpectralDecomposition,
    /// `c_j = Σ_y √m(y) u_j(y)`, so that the mass is `Σ_j e^{−tλ_j} u_j(x) c_j / √m(x)`.
    mass_coefficients: Vec<f64>,
}

impl HeatKernel {
    pub fn new(generator: &DirichletGenerator) -> Result<Self> {
        let spectrum = generator.decompose()?;
        Ok(Self::from_parts(generator, spectrum))
    }

    pub fn on_domain(g: &WeightedGraph, domain: &VertexSet) -> Result<Self> {
        Self::new(&assemble_dirichlet(g, domain)?)
    }

    pub fn from_parts(generator: &DirichletGenerator, spectrum: SpectralDecomposition) -> Self {
        let n = generator.domain.len();
        let mut index = vec![usize::MAX; generator.universe];
        for (i, &v) in generator.domain.iter().enumerate() {
            index[v] = i;
        }
        let mass_coefficients = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| generator.sqrt_measure[i] * spectrum.vector_entry(i, j))
                    .sum()
            })
            .collect();
        Self {
            domain: generator.domain.clone(),
            index,
            sqrt_measure: generator.sqrt_measure.clone(),
            spectrum,
            mass_coefficients,
        }
    }

    pub fn domain(&self) -> &[VertexId] {
        &self.domain
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.index.get(x).is_some_and(|&i| i != usize::MAX)
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// Bottom of the Dirichlet spectrum on the domain.
    pub fn lambda_bottom(&self) -> f64 {
        self.spectrum.eigenvalues[0]
    }

    fn position(&self, x: VertexId) -> Result<usize> {
        match self.index.get(x) {
            Some(&i) if i != usize::MAX => Ok(i),
            _ => Err(Error::NotInDomain(x)),
        }
    }

    fn check_time(t: f64) -> Result<()> {
        check_param("t", t, t >= 0.0 && t.is_finite(), "finite and >= 0")
    }

    fn raw(&self, t: f64, i: usize, k: usize) -> f64 {
        let n = self.domain.len();
        let ri = &self.spectrum.vectors[i * n..(i + 1) * n];
        let rk = &self.spectrum.vectors[k * n..(k + 1) * n];
        let sum: f64 = self
            .spectrum
            .eigenvalues
            .iter()
            .zip(ri.iter().zip(rk))
            .map(|(&l, (a, b))| (-t * l).exp() * a * b)
            .sum();
        sum / (self.sqrt_measure[i] * self.sqrt_measure[k])
    }

    fn clamp(v: f64) -> f64 {
        if (-CLAMP..0.0).contains(&v) {
            0.0
        } else {
            v
        }
    }

    /// `p^A_t(x, y)`; exact at `t = 0`.
    pub fn value(&self, t: f64, x: VertexId, y: VertexId) -> Result<f64> {
        Self::check_time(t)?;
        let (i, k) = (self.position(x)?, self.position(y)?);
        if t == 0.0 {
            return Ok(if i == k {
                1.0 / self.sqrt_measure[i].powi(2)
            } else {
                0.0
            });
        }
        Ok(Self::clamp(self.raw(t, i, k)))
    }

    /// Kernel values at many pairs, evaluated in parallel.
    pub fn values(&self, t: f64, pairs: &[(VertexId, VertexId)]) -> Result<Vec<f64>> {
        pairs
            .par_iter()
            .map(|&(x, y)| self.value(t, x, y))
            .collect()
    }

    /// `y ↦ p^A_t(x, y)` over the domain, in domain order.
    pub fn row(&self, t: f64, x: VertexId) -> Result<Vec<f64>> {
        Self::check_time(t)?;
        let i = self.position(x)?;
        Ok((0..self.domain.len())
            .map(|k| match (t == 0.0, i == k) {
                (true, true) => 1.0 / self.sqrt_measure[i].powi(2),
                (true, false) => 0.0,
                (false, _) => Self::clamp(self.raw(t, i, k)),
            })
            .collect())
    }

    /// `Σ_y m(y) p^A_t(x, y)`.
    pub fn mass(&self, t: f64, x: VertexId) -> Result<f64> {
        Self::check_time(t)?;
        let i = self.position(x)?;
        let n = self.domain.len();
        let ri = &self.spectrum.vectors[i * n..(i + 1) * n];
        let sum: f64 = (0..n)
            .map(|j| (-t * self.spectrum.eigenvalues[j]).exp() * ri[j] * self.mass_coefficients[j])
            .sum();
        Ok(sum / self.sqrt_measure[i])
    }

    /// `1 − Σ_y m(y) p^A_t(x, y)`.
    pub fn mass_defect(&self, t: f64, x: VertexId) -> Result<f64> {
        Ok(1.0 - self.mass(t, x)?)
    }
}

/// `a, a·ratio, a·ratio², …` up to `b`. A point within rounding of `b` is
/// replaced by `b`.
pub fn geometric_grid(a: f64, b: f64, ratio: f64) -> Result<Vec<f64>> {
    check_param("a", a, a > 0.0 && a.is_finite(), "finite and positive")?;
    check_param("b", b, b >= a && b.is_finite(), "finite and >= a")?;
    check_param("ratio", ratio, ratio > 1.0, "greater than 1")?;
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let t = a * ratio.powi(k);
        if t > b * (1.0 + 1e-12) {
            break;
        }
        grid.push(t.min(b));
        k += 1;
    }
    Ok(grid)
}

pub const DEFAULT_GRID_RATIO: f64 = std::f64::consts::SQRT_2;

/// `λ_0(A_k)` for each set of an exhaustion.
pub fn lambda_bottom(g: &WeightedGraph, sets: &[VertexSet]) -> Result<Vec<f64>> {
    sets.iter()
        .map(|a| Ok(assemble_dirichlet(g, a)?.eigenvalues()?[0]))
        .collect()
}

#[derive(Clone, Debug)]
pub struct ExhaustionOptions {
    pub probes: Vec<(VertexId, VertexId)>,
    pub times: Vec<f64>,
    pub tol: f64,
    pub initial_radius: f64,
    pub growth: f64,
    pub max_vertices: usize,
    pub max_steps: usize,
}

impl Default for ExhaustionOptions {
    fn default() -> Self {
        Self {
            probes: Vec::new(),
            times: Vec::new(),
            tol: 1e-10,
            initial_radius: 1.0,
            growth: 1.5,
            max_vertices: 12_000,
            max_steps: 40,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Successive truncations agree within the tolerance.
    Converged,
    /// The domain is the whole finite graph, so the kernel is exact.
    Exact,
    /// A cap was hit before agreement.
    Unconverged,
    /// A fixed finite domain chosen by the caller. Its kernel lower-bounds the
    /// kernel of any larger domain.
    Truncated,
}

impl Verdict {
    pub fn is_usable(self) -> bool {
        !matches!(self, Verdict::Unconverged)
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::Exact => "exact",
            Verdict::Unconverged => "unconverged",
            Verdict::Truncated => "truncated",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub radius: f64,
    pub size: usize,
    /// Probe values, probe-major then time: `values[p * times.len() + k]`.
    pub values: Vec<f64>,
    pub max_change: Option<f64>,
}

#[derive(Debug)]
pub struct Exhaustion {
    pub domain: VertexSet,
    pub kernel: HeatKernel,
    pub trace: Vec<TraceStep>,
    pub verdict: Verdict,
}

/// Grows balls about `center` (minus the frontier zone of a truncated
/// realization) until kernel values at the probes stop changing by `tol`.
pub fn exhaustion_converge(
    g: &WeightedGraph,
    rho: &VertexMetric<'_>,
    center: VertexId,
    options: &ExhaustionOptions,
) -> Result<Exhaustion> {
    check_param("tol", options.tol, options.tol > 0.0, "positive")?;
    check_param(
        "growth",
        options.growth,
        options.growth > 1.0,
        "greater than 1",
    )?;
    check_param(
        "initial_radius",
        options.initial_radius,
        options.initial_radius > 0.0,
        "positive",
    )?;
    for &t in &options.times {
        check_param("t", t, t >= 0.0 && t.is_finite(), "finite and >= 0")?;
    }

    let admissible = |v: VertexId| !g.is_frontier(v);
    let reachable = (0..g.vertex_count()).filter(|&v| admissible(v)).count();
    let mut radius = options.initial_radius;
    let mut trace: Vec<TraceStep> = Vec::new();
    let mut previous: Option<VertexSet> = None;

    loop {
        let ball = rho.ball(center, radius, true).members;
        let domain =
            VertexSet::from_vertices(g.vertex_count(), ball.iter().filter(|&v| admissible(v)));
        if previous.as_ref() == Some(&domain) {
            radius *= options.growth;
            continue;
        }
        if domain.len() > options.max_vertices {
            let Some(last) = previous else {
                return Err(Error::RealizationTooLarge {
                    what: "domain vertices",
                    count: domain.len() as u128,
                    cap: options.max_vertices as u128,
                });
            };
            let kernel = HeatKernel::on_domain(g, &last)?;
            return Ok(Exhaustion {
                domain: last,
                kernel,
                trace,
                verdict: Verdict::Unconverged,
            });
        }

        let kernel = HeatKernel::on_domain(g, &domain)?;
        let mut values = Vec::with_capacity(options.probes.len() * options.times.len());
        for &(x, y) in &options.probes {
            for &t in &options.times {
                values.push(if kernel.contains(x) && kernel.contains(y) {
                    kernel.value(t, x, y)?
                } else {
                    0.0
                });
            }
        }
        let max_change = trace.last().map(|step| {
            step.values
                .iter()
                .zip(&values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        });
        trace.push(TraceStep {
            radius,
            size: domain.len(),
            values,
            max_change,
        });

        let whole = domain.len() == reachable;
        let verdict = if whole && !g.has_frontier() {
            Some(Verdict::Exact)
        } else if max_change.is_some_and(|c| c < options.tol) {
            Some(Verdict::Converged)
        } else if whole || trace.len() >= options.max_steps {
            Some(Verdict::Unconverged)
        } else {
            None
        };
        if let Some(verdict) = verdict {
            return Ok(Exhaustion {
                domain,
                kernel,
                trace,
                verdict,
            });
        }
        previous = Some(domain);
        radius *= options.growth;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_vertices() -> WeightedGraph {
        WeightedGraph::new(vec![1.0, 1.0], [(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn two_vertex_assembly() {
        let g = two_vertices();
        let full = assemble_dirichlet(&g, &VertexSet::full(2)).unwrap();
        let m = full.matrix();
        assert_eq!(
            [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]],
            [1.0, -1.0, -1.0, 1.0]
        );
        let single = assemble_dirichlet(&g, &VertexSet::from_vertices(2, [0])).unwrap();
        assert_eq!(single.matrix()[(0, 0)], 1.0);
        assert!(matches!(
            assemble_dirichlet(&g, &VertexSet::empty(2)),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn measure_scaling_scales_generator() {
        let g = WeightedGraph::new(vec![1.0, 2.0, 0.5], [(0, 1, 1.0), (1, 2, 3.0)]).unwrap();
        let h = WeightedGraph::new(vec![3.0, 6.0, 1.5], [(0, 1, 1.0), (1, 2, 3.0)]).unwrap();
        let a = assemble_dirichlet(&g, &VertexSet::full(3)).unwrap();
        let b = assemble_dirichlet(&h, &VertexSet::full(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.matrix()[(i, j)] / 3.0 - b.matrix()[(i, j)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_vertex_kernel_closed_form() {
        let g = two_vertices();
        let k = HeatKernel::on_domain(&g, &VertexSet::full(2)).unwrap();
        for t in [0.0_f64, 0.1, 1.0, 10.0] {
            let e = (-2.0 * t).exp();
            assert!((k.value(t, 0, 0).unwrap() - (1.0 + e) / 2.0).abs() < 1e-12);
            assert!((k.value(t, 0, 1).unwrap() - (1.0 - e) / 2.0).abs() < 1e-12);
            assert!(k.mass_defect(t, 0).unwrap().abs() < 1e-12);
        }
        assert!(k.value(-1.0, 0, 0).is_err());
        assert!(k.lambda_bottom().abs() < 1e-14);
    }

    #[test]
    fn initial_condition_uses_measure() {
        let g = WeightedGraph::new(vec![4.0, 1.0], [(0, 1, 1.0)]).unwrap();
        let k = HeatKernel::on_domain(&g, &VertexSet::full(2)).unwrap();
        assert_eq!(k.value(0.0, 0, 0).unwrap(), 0.25);
        assert_eq!(k.value(0.0, 0, 1).unwrap(), 0.0);
        assert_eq!(k.row(0.0, 1).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn single_vertex_domain_decays() {
        let g = two_vertices();
        let k = HeatKernel::on_domain(&g, &VertexSet::from_vertices(2, [0])).unwrap();
        assert!((k.value(1.5, 0, 0).unwrap() - (-1.5f64).exp()).abs() < 1e-15);
        assert!(matches!(k.value(1.0, 0, 1), Err(Error::NotInDomain(1))));
    }

    #[test]
    fn reconstruction_is_tight() {
        let g = WeightedGraph::new(
            vec![1.0, 2.0, 0.5, 1.5],
            [(0, 1, 1.0), (1, 2, 3.0), (2, 3, 0.2), (0, 3, 1.0)],
        )
        .unwrap();
        let gen = assemble_dirichlet(&g, &VertexSet::from_vertices(4, [0, 1, 2])).unwrap();
        let dec = gen.decompose().unwrap();
        assert!(dec.reconstruction_residual(&gen) < 1e-12);
        assert!(dec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        let only = gen.eigenvalues().unwrap();
        for (a, b) in only.iter().zip(dec.eigenvalues()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn grid() {
        let grid = geometric_grid(1.0, 4.0, 2.0).unwrap();
        assert_eq!(grid, vec![1.0, 2.0, 4.0]);
        assert_eq!(
            geometric_grid(1.0, 1.9, DEFAULT_GRID_RATIO).unwrap().len(),
            2
        );
        assert!(geometric_grid(1.0, 2.0, 1.0).is_err());
        let decay = geometric_grid(50.0, 800.0, DEFAULT_GRID_RATIO).unwrap();
        assert_eq!((decay.len(), decay[8]), (9, 800.0));
    }

    #[test]
    fn exhaustion_on_finite_graph_is_exact() {
        let g = two_vertices();
        let rho = VertexMetric::path_degree(&g).unwrap();
        let options = ExhaustionOptions {
            probes: vec![(0, 0)],
            times: vec![1.0],
            initial_radius: 5.0,
            ..Default::default()
        };
        let run = exhaustion_converge(&g, &rho, 0, &options).unwrap();
        assert_eq!(run.verdict, Verdict::Exact);
        assert_eq!(run.trace.len(), 1);
    }
}
