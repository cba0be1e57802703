//! Kernel quadrature weights for node sets that are unions of fully
//! symmetric sets.
//!
//! Nodes in one fully symmetric set share a single weight. The `J` distinct
//! weights solve `S w = b`, where `S_ij` is the sum of `k(xⁱ, x)` over all
//! `x` in set `j` for any representative `xⁱ` of set `i`, and `b_j` is the
//! kernel mean at generator `j`. Building `S` costs `J·n` kernel
//! evaluations; the full `n × n` system is only solved by [`naive_weights`],
//! which exists as a correctness oracle.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{initial_error_sq, kernel_mean, GaussianKernel, Kernel, SymmetricMeasure};
use crate::linalg::{lu_factor, DenseMatrix};
use crate::symmetry::{expand_with_cap, FullySymmetricSet, GeneratorVector, DEFAULT_SET_CAP};

/// Pivots below this multiple of `max|S|` flag `S` as ill-conditioned.
pub const PIVOT_REL_TOL: f64 = 1e-14;
/// Relative residual above which a solve is flagged.
pub const RESIDUAL_WARN_TOL: f64 = 1e-8;
/// Squared WCE values in `[WCE_CLAMP, 0)` are round-off and clamp to zero.
pub const WCE_CLAMP: f64 = -1e-10;
/// Default node cap for the `O(n³)` oracle.
pub const NAIVE_NODE_CAP: usize = 10_000;
/// Condition estimate above which the oracle result is flagged.
pub const NAIVE_COND_WARN: f64 = 1e14;

/// Ordered union of `J` distinct fully symmetric sets.
#[derive(Debug, Clone)]
pub struct SymmetricNodeSet {
    dim: usize,
    sets: Vec<FullySymmetricSet>,
    total_nodes: usize,
}

impl SymmetricNodeSet {
    /// Builds a node set, rejecting mixed dimensions and duplicate generators.
    pub fn new(dim: usize, sets: Vec<FullySymmetricSet>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for (index, set) in sets.iter().enumerate() {
            if set.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: set.dim(),
                });
            }
            if sets[..index]
                .iter()
                .any(|other| other.generator() == set.generator())
            {
                return Err(Error::DuplicateGenerator { index });
            }
        }
        Ok(Self::new_unchecked(dim, sets))
    }

    /// Skips the distinctness check. Duplicate sets make `S` singular, which
    /// is occasionally useful for exercising that error path.
    pub fn new_unchecked(dim: usize, sets: Vec<FullySymmetricSet>) -> Self {
        let total_nodes = sets.iter().map(FullySymmetricSet::size).sum();
        Self {
            dim,
            sets,
            total_nodes,
        }
    }

    pub fn empty(dim: usize) -> Self {
        Self::new_unchecked(dim, Vec::new())
    }

    /// Expands every generator (in parallel) and keeps the given order.
    pub fn from_generators(generators: &[GeneratorVector], set_cap: u64) -> Result<Self> {
        let dim = generators.first().map(GeneratorVector::dim).ok_or(Error::EmptyNodeSet)?;
        let sets = generators
            .par_iter()
            .map(|g| expand_with_cap(g, set_cap))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, sets)
    }

    pub fn from_generators_default(generators: &[GeneratorVector]) -> Result<Self> {
        Self::from_generators(generators, DEFAULT_SET_CAP)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sets(&self) -> &[FullySymmetricSet] {
        &self.sets
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn total_nodes(&self) -> usize {
        self.total_nodes
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(FullySymmetricSet::size).collect()
    }

    pub fn generators(&self) -> impl Iterator<Item = &GeneratorVector> {
        self.sets.iter().map(FullySymmetricSet::generator)
    }

    /// All nodes, set by set, in the deterministic order.
    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.sets.iter().flat_map(FullySymmetricSet::points)
    }

    /// Drops the set generated by the origin, if present.
    pub fn without_center(&self) -> Self {
        let sets = self
            .sets
            .iter()
            .filter(|s| !s.generator().is_origin())
            .cloned()
            .collect();
        Self::new_unchecked(self.dim, sets)
    }
}

/// The `J × J` matrix of block row sums.
#[derive(Debug, Clone)]
pub struct SMatrix {
    matrix: DenseMatrix,
    set_sizes: Vec<usize>,
}

impl SMatrix {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn set_sizes(&self) -> &[usize] {
        &self.set_sizes
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn size(&self) -> usize {
        self.set_sizes.len()
    }
}

/// Builds `S` using the first point of each set as its representative.
///
/// Rows are computed in parallel; each row is summed sequentially in point
/// order, so the result does not depend on the thread count.
pub fn build_s_matrix(node_set: &SymmetricNodeSet, k: &GaussianKernel) -> Result<SMatrix> {
    if node_set.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    let sets = node_set.sets();
    let j = sets.len();
    let rows = sets
        .par_iter()
        .map(|si| {
            let rep = si.representative();
            let mut row = Vec::with_capacity(j);
            for sj in sets {
                let sum: f64 = sj.points().map(|x| k.eval(rep, x)).sum();
                if !sum.is_finite() {
                    return Err(Error::NonFiniteEvaluation {
                        point: rep.to_vec(),
                        value: sum,
                    });
                }
                row.push(sum);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SMatrix {
        matrix: DenseMatrix::from_row_major(j, rows.concat()),
        set_sizes: node_set.sizes(),
    })
}

#[derive(Debug, Clone)]
pub struct WeightSolution {
    pub weights: Vec<f64>,
    /// `‖S w − b‖∞ / ‖b‖∞`.
    pub rel_residual: f64,
    pub residual_warning: bool,
    /// 1-norm condition number of `S`.
    pub cond_estimate: f64,
    /// Smallest pivot `(index, value)` when it fell below
    /// `PIVOT_REL_TOL · max|S|`.
    pub small_pivot: Option<(usize, f64)>,
}

/// Solves `S w = means` by LU with partial pivoting.
pub fn solve_weights(s: &SMatrix, means: &[f64]) -> Result<WeightSolution> {
    if means.len() != s.size() {
        return Err(Error::DimensionMismatch {
            expected: s.size(),
            got: means.len(),
        });
    }
    if let Some(&value) = means.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFiniteEvaluation {
            point: Vec::new(),
            value,
        });
    }
    if let Some(j) = duplicate_column(&s.matrix) {
        return Err(Error::SingularSystem {
            pivot_index: j,
            pivot: 0.0,
        });
    }
    let lu = lu_factor(&s.matrix, 0.0)?;
    let (index, pivot) = lu.smallest_pivot();
    let small_pivot = (pivot.abs() < PIVOT_REL_TOL * s.matrix.max_abs()).then_some((index, pivot));
    let weights = lu.solve(means);
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::SingularSystem {
            pivot_index: index,
            pivot,
        });
    }
    let residual = s
        .matrix
        .mul_vec(&weights)
        .iter()
        .zip(means)
        .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    let scale = means.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let rel_residual = if scale > 0.0 { residual / scale } else { residual };
    Ok(WeightSolution {
        weights,
        rel_residual,
        residual_warning: rel_residual.is_nan() || rel_residual > RESIDUAL_WARN_TOL,
        cond_estimate: s.matrix.norm_1() * lu.inverse_norm_1(),
        small_pivot,
    })
}

/// First column that repeats an earlier one to within `PIVOT_REL_TOL · max|S|`.
fn duplicate_column(m: &DenseMatrix) -> Option<usize> {
    let n = m.size();
    let tol = PIVOT_REL_TOL * m.max_abs();
    (1..n).find(|&j| (0..j).any(|i| (0..n).all(|r| (m.get(r, i) - m.get(r, j)).abs() <= tol)))
}

#[derive(Debug, Clone)]
pub struct NaiveSolution {
    /// One weight per node, in input order.
    pub weights: Vec<f64>,
    /// 1-norm condition estimate of the full kernel matrix.
    pub cond_estimate: f64,
    pub ill_conditioned: bool,
}

/// Hager's estimate of `‖A⁻¹‖₁` for symmetric `A`, given a solver.
fn estimate_inverse_norm_1(n: usize, solve: impl Fn(&DVector<f64>) -> DVector<f64>) -> f64 {
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut estimate = 0.0;
    for _ in 0..5 {
        let y = solve(&x);
        estimate = y.iter().map(|v| v.abs()).sum();
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = solve(&xi);
        let (jmax, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        if zmax <= z.dot(&x) {
            break;
        }
        x = DVector::zeros(n);
        x[jmax] = 1.0;
    }
    estimate
}

/// Solves the full `n × n` system `K w = k_μ(X)`; the correctness oracle.
pub fn naive_weights(
    nodes: &[Vec<f64>],
    k: &GaussianKernel,
    mu: &SymmetricMeasure,
) -> Result<NaiveSolution> {
    naive_weights_with_cap(nodes, k, mu, NAIVE_NODE_CAP)
}

pub fn naive_weights_with_cap(
    nodes: &[Vec<f64>],
    k: &GaussianKernel,
    mu: &SymmetricMeasure,
    cap: usize,
) -> Result<NaiveSolution> {
    let n = nodes.len();
    if n == 0 {
        return Err(Error::EmptyNodeSet);
    }
    if n > cap {
        return Err(Error::TooManyNodes {
            count: n as u64,
            cap: cap as u64,
        });
    }
    let gram = DMatrix::from_fn(n, n, |i, j| k.eval(&nodes[i], &nodes[j]));
    let rhs = DVector::from_iterator(
        n,
        nodes
            .iter()
            .map(|x| kernel_mean(k, mu, x))
            .collect::<Result<Vec<_>>>()?,
    );
    let norm_1 = gram
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);

    let (weights, inv_norm) = match gram.clone().cholesky() {
        Some(chol) => {
            let w = chol.solve(&rhs);
            let inv = estimate_inverse_norm_1(n, |b| chol.solve(b));
            (w, inv)
        }
        None => {
            let lu = gram.lu();
            let w = lu.solve(&rhs).ok_or(Error::SingularSystem {
                pivot_index: 0,
                pivot: 0.0,
            })?;
            let inv = estimate_inverse_norm_1(n, |b| lu.solve(b).unwrap_or_else(|| b.clone()));
            (w, inv.max(1.0 / f64::EPSILON))
        }
    };
    let cond_estimate = norm_1 * inv_norm;
    Ok(NaiveSolution {
        weights: weights.iter().copied().collect(),
        cond_estimate,
        ill_conditioned: cond_estimate > NAIVE_COND_WARN,
    })
}

/// Fully symmetric kernel quadrature rule.
#[derive(Debug, Clone)]
pub struct FsQuadratureRule {
    node_set: SymmetricNodeSet,
    kernel: GaussianKernel,
    measure: SymmetricMeasure,
    weights: Vec<f64>,
    means: Vec<f64>,
    initial_error_sq: f64,
    wce: Wce,
    cond_estimate: f64,
    residual_warning: bool,
    small_pivot: Option<(usize, f64)>,
}

/// Worst-case error with its numerical-health flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wce {
    pub value: f64,
    /// The squared error came out below `WCE_CLAMP` before clamping.
    pub unstable: bool,
}

/// Wall-clock breakdown of [`make_rule_timed`].
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleTimings {
    pub kernel_s: f64,
    pub weights_s: f64,
}

fn check_pair(node_set: &SymmetricNodeSet, mu: &SymmetricMeasure) -> Result<()> {
    if node_set.dim() != mu.dim {
        return Err(Error::DimensionMismatch {
            expected: mu.dim,
            got: node_set.dim(),
        });
    }
    Ok(())
}

pub fn make_rule(
    node_set: SymmetricNodeSet,
    k: &GaussianKernel,
    mu: &SymmetricMeasure,
) -> Result<FsQuadratureRule> {
    make_rule_timed(node_set, k, mu).map(|(rule, _)| rule)
}

/// Builds `S`, evaluates the kernel mean once per generator, and solves.
pub fn make_rule_timed(
    node_set: SymmetricNodeSet,
    k: &GaussianKernel,
    mu: &SymmetricMeasure,
) -> Result<(FsQuadratureRule, RuleTimings)> {
    check_pair(&node_set, mu)?;
    let start = Instant::now();
    let s = build_s_matrix(&node_set, k)?;
    let kernel_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let means = node_set
        .generators()
        .map(|g| kernel_mean(k, mu, g.values()))
        .collect::<Result<Vec<_>>>()?;
    let solution = solve_weights(&s, &means)?;
    let weights_s = start.elapsed().as_secs_f64();

    let initial = initial_error_sq(k, mu)?;
    let mut rule = FsQuadratureRule {
        node_set,
        kernel: *k,
        measure: *mu,
        weights: solution.weights,
        means,
        initial_error_sq: initial,
        wce: Wce {
            value: initial.sqrt(),
            unstable: false,
        },
        cond_estimate: solution.cond_estimate,
        residual_warning: solution.residual_warning,
        small_pivot: solution.small_pivot,
    };
    rule.wce = worst_case_error(&rule);
    Ok((rule, RuleTimings { kernel_s, weights_s }))
}

impl FsQuadratureRule {
    /// The rule with no nodes: `Q ≡ 0`, WCE equal to the initial error.
    pub fn empty(k: &GaussianKernel, mu: &SymmetricMeasure) -> Result<Self> {
        let initial = initial_error_sq(k, mu)?;
        Ok(Self {
            node_set: SymmetricNodeSet::empty(mu.dim),
            kernel: *k,
            measure: *mu,
            weights: Vec::new(),
            means: Vec::new(),
            initial_error_sq: initial,
            wce: Wce {
                value: initial.sqrt(),
                unstable: false,
            },
            cond_estimate: 0.0,
            residual_warning: false,
            small_pivot: None,
        })
    }

    pub fn node_set(&self) -> &SymmetricNodeSet {
        &self.node_set
    }

    pub fn kernel(&self) -> &GaussianKernel {
        &self.kernel
    }

    pub fn measure(&self) -> &SymmetricMeasure {
        &self.measure
    }

    /// One weight per fully symmetric set.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Kernel mean at each generator.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn initial_error_sq(&self) -> f64 {
        self.initial_error_sq
    }

    pub fn wce(&self) -> f64 {
        self.wce.value
    }

    pub fn wce_unstable(&self) -> bool {
        self.wce.unstable
    }

    pub fn cond_estimate(&self) -> f64 {
        self.cond_estimate
    }

    pub fn residual_warning(&self) -> bool {
        self.residual_warning
    }

    /// Smallest LU pivot of `S`, if it fell below `PIVOT_REL_TOL · max|S|`.
    pub fn small_pivot(&self) -> Option<(usize, f64)> {
        self.small_pivot
    }

    pub fn has_warning(&self) -> bool {
        self.residual_warning || self.wce.unstable || self.small_pivot.is_some()
    }

    /// Per-node weights in node order.
    pub fn expanded_weights(&self) -> Vec<f64> {
        self.node_set
            .sets()
            .iter()
            .zip(&self.weights)
            .flat_map(|(s, &w)| std::iter::repeat_n(w, s.size()))
            .collect()
    }

    /// Removes the origin set and re-solves the remaining weights.
    pub fn without_center(&self) -> Result<Self> {
        let reduced = self.node_set.without_center();
        if reduced.is_empty() {
            return Self::empty(&self.kernel, &self.measure);
        }
        make_rule(reduced, &self.kernel, &self.measure)
    }
}

/// `Q_k(f) = Σ_j w_j f[λʲ]`; evaluates `f` exactly once per node.
pub fn integrate<F>(rule: &FsQuadratureRule, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut acc = 0.0;
    for (set, &w) in rule.node_set.sets().iter().zip(&rule.weights) {
        acc += w * crate::symmetry::sum_over_set(&f, set)?;
    }
    Ok(acc)
}

/// Applies the rule to precomputed values given in node order.
pub fn integrate_values(rule: &FsQuadratureRule, values: &[f64]) -> Result<f64> {
    if values.len() != rule.node_set.total_nodes() {
        return Err(Error::DimensionMismatch {
            expected: rule.node_set.total_nodes(),
            got: values.len(),
        });
    }
    let mut acc = 0.0;
    let mut offset = 0;
    for (set, &w) in rule.node_set.sets().iter().zip(&rule.weights) {
        let block = &values[offset..offset + set.size()];
        let mut sum = 0.0;
        for (i, &v) in block.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEvaluation {
                    point: set.point(i).to_vec(),
                    value: v,
                });
            }
            sum += v;
        }
        acc += w * sum;
        offset += set.size();
    }
    Ok(acc)
}

/// `e² = μ(k_μ) − Σ_j w_j nʲ k_μ(λʲ)`, clamped at zero.
pub fn worst_case_error(rule: &FsQuadratureRule) -> Wce {
    let explained: f64 = rule
        .node_set
        .sets()
        .iter()
        .zip(&rule.weights)
        .zip(&rule.means)
        .map(|((s, w), m)| w * s.size() as f64 * m)
        .sum();
    let e2 = rule.initial_error_sq - explained;
    if e2 >= 0.0 {
        Wce {
            value: e2.sqrt(),
            unstable: false,
        }
    } else {
        Wce {
            value: 0.0,
            unstable: e2 < WCE_CLAMP,
        }
    }
}
