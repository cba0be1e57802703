//! Drivers for the three numerical experiments and their baselines.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::experiments::integrands::{
    bond_closed_form, bond_integrand, integrand_ex1, integrand_ex2, true_integral_ex2, VasicekParams,
    EX1_REFERENCE, EX2_DIM, EX2_LENGTH_SCALE,
};
use crate::experiments::mle::{log_grid, mle_lengthscale, MLE_JITTER};
use crate::experiments::report::{ExperimentId, ExperimentReport, ReportRow, RowFailure};
use crate::kernels::{initial_error_sq, kernel_mean, GaussianKernel, MeasureKind, SymmetricMeasure};
use crate::node_selection::{
    count_nodes, gauss_hermite_basis, random_generators, sparse_grid_generators, NestedBasis, RandomKind,
};
use crate::symmetry::GeneratorVector;
use crate::weights::{integrate, make_rule_timed, SymmetricNodeSet, WCE_CLAMP};

/// Levels beyond this need `allow_large` in [`ExperimentConfig`].
pub const EX2_DEFAULT_MAX_LEVEL: usize = 5;
/// Points per set for random generators in three dimensions.
pub const EX1_SET_SIZE: usize = 48;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Highest Clenshaw–Curtis level for ex2.
    pub q_max: usize,
    /// Gauss–Hermite level for ex3.
    pub level: usize,
    /// Euler step counts for ex3.
    pub dims: Vec<usize>,
    /// Numbers of random fully symmetric sets for ex1.
    pub j_values: Vec<usize>,
    /// One ex1 run per seed; one ex3 Monte Carlo baseline per seed.
    pub seeds: Vec<u64>,
    /// Overrides the fitted (ex1), known (ex2) or `ℓ = d` (ex3) length scale.
    pub length_scale: Option<f64>,
    /// Candidates for the ex1 marginal-likelihood fit.
    pub mle_grid: Vec<f64>,
    /// ex1: fit the length scale on the symmetric nodes instead of the KMC samples.
    pub fit_on_fss: bool,
    /// ex3: remove the origin set before solving.
    pub drop_center: bool,
    pub node_cap: u64,
    /// ex2: permit levels above [`EX2_DEFAULT_MAX_LEVEL`].
    pub allow_large: bool,
}

impl ExperimentConfig {
    pub fn default_for(id: ExperimentId) -> Self {
        let mut config = Self {
            q_max: EX2_DEFAULT_MAX_LEVEL,
            level: 2,
            dims: vec![10, 20, 30, 40, 50],
            j_values: vec![5, 10, 25, 50],
            seeds: (0..10).collect(),
            length_scale: None,
            mle_grid: log_grid(0.1, 2.0, 14),
            fit_on_fss: false,
            drop_center: true,
            node_cap: 5_000_000,
            allow_large: false,
        };
        if id == ExperimentId::Ex2 {
            config.seeds = vec![0];
        }
        config
    }

    pub fn validate(&self, id: ExperimentId) -> Result<()> {
        if let Some(l) = self.length_scale {
            if !(l.is_finite() && l > 0.0) {
                return Err(invalid("length_scale", "must be positive and finite"));
            }
        }
        if self.node_cap == 0 {
            return Err(invalid("node_cap", "must be positive"));
        }
        match id {
            ExperimentId::Ex1 => {
                if self.seeds.is_empty() {
                    return Err(invalid("seeds", "at least one seed is required"));
                }
                if self.length_scale.is_none()
                    && (self.mle_grid.is_empty() || self.mle_grid.iter().any(|l| !(l.is_finite() && *l > 0.0)))
                {
                    return Err(invalid("mle_grid", "needs positive finite candidates"));
                }
            }
            ExperimentId::Ex2 => {
                if self.q_max == 0 {
                    return Err(invalid("q_max", "must be at least 1"));
                }
                if self.q_max > EX2_DEFAULT_MAX_LEVEL && !self.allow_large {
                    return Err(invalid(
                        "q_max",
                        format!("levels above {EX2_DEFAULT_MAX_LEVEL} need allow_large"),
                    ));
                }
            }
            ExperimentId::Ex3 => {
                if self.level == 0 {
                    return Err(invalid("level", "must be at least 1"));
                }
                if self.dims.is_empty() {
                    return Err(invalid("dims", "at least one dimension is required"));
                }
                for &d in &self.dims {
                    VasicekParams::benchmark(d).validate()?;
                }
            }
        }
        Ok(())
    }
}

/// Plain Monte Carlo mean of `f` under `kind` in `dim` dimensions.
pub fn monte_carlo<F>(f: F, dim: usize, n: usize, kind: MeasureKind, seed: u64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let uniform = Uniform::new_inclusive(-1.0f64, 1.0).expect("valid range");
    let mut x = vec![0.0; dim];
    let mut acc = 0.0;
    for _ in 0..n {
        for v in x.iter_mut() {
            *v = match kind {
                MeasureKind::StandardGaussian => StandardNormal.sample(&mut rng),
                MeasureKind::UniformCube => uniform.sample(&mut rng),
            };
        }
        acc += f(&x);
    }
    acc / n as f64
}

/// Independent standard normal samples (separate stream from
/// [`random_generators`] with the same seed).
pub fn gaussian_samples(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..n)
        .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect()
}

/// Kernel quadrature on arbitrary nodes through the full jittered system.
#[derive(Debug, Clone)]
pub struct KmcRule {
    pub weights: Vec<f64>,
    pub wce: f64,
    pub t_kernel_s: f64,
    pub t_weights_s: f64,
}

pub fn kmc_rule(nodes: &[Vec<f64>], k: &GaussianKernel, mu: &SymmetricMeasure) -> Result<KmcRule> {
    let n = nodes.len();
    if n == 0 {
        return Err(Error::EmptyNodeSet);
    }
    let start = Instant::now();
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let r2: f64 = nodes[i].iter().zip(&nodes[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            let v = k.of_sq_dist(r2);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
        gram[(j, j)] += MLE_JITTER * k.scale();
    }
    let t_kernel_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let means = nodes.iter().map(|x| kernel_mean(k, mu, x)).collect::<Result<Vec<_>>>()?;
    let chol = gram.cholesky().ok_or(Error::SingularSystem {
        pivot_index: 0,
        pivot: 0.0,
    })?;
    let w = chol.solve(&DVector::from_column_slice(&means));
    let t_weights_s = start.elapsed().as_secs_f64();

    let explained: f64 = w.iter().zip(&means).map(|(a, b)| a * b).sum();
    let e2 = initial_error_sq(k, mu)? - explained;
    let wce = if e2 >= WCE_CLAMP { e2.max(0.0).sqrt() } else { f64::NAN };
    Ok(KmcRule {
        weights: w.iter().copied().collect(),
        wce,
        t_kernel_s,
        t_weights_s,
    })
}

struct FsRun {
    row: ReportRow,
}

/// Builds the rule on `generators`, integrates `f`, and fills a report row.
fn run_fs_rule<F>(
    generators: &[GeneratorVector],
    t_generators: f64,
    k: &GaussianKernel,
    mu: &SymmetricMeasure,
    f: F,
    truth: f64,
    node_cap: u64,
) -> Result<FsRun>
where
    F: Fn(&[f64]) -> f64,
{
    let count = count_nodes(generators)?;
    if count > node_cap {
        return Err(Error::TooManyNodes { count, cap: node_cap });
    }
    let start = Instant::now();
    let nodes = SymmetricNodeSet::from_generators_default(generators)?;
    let t_fss_s = t_generators + start.elapsed().as_secs_f64();
    let (n, j) = (nodes.total_nodes(), nodes.num_sets());
    let (rule, timings) = make_rule_timed(nodes, k, mu)?;
    let estimate = integrate(&rule, f)?;

    let mut row = ReportRow::new("fskq", mu.dim, n, j, estimate, truth);
    row.wce = Some(rule.wce());
    row.t_kernel_s = timings.kernel_s;
    row.t_weights_s = timings.weights_s;
    row.t_fss_s = t_fss_s;
    row.kernel_evals = (j as u64) * (n as u64);
    row.length_scale = Some(k.length_scale());
    let mut notes = Vec::new();
    if rule.residual_warning() {
        notes.push(format!("large residual in the weight solve (cond ≈ {:.3e})", rule.cond_estimate()));
    }
    if let Some((index, pivot)) = rule.small_pivot() {
        notes.push(format!("ill-conditioned weight system (pivot {index} is {pivot:.3e})"));
    }
    if rule.wce_unstable() {
        notes.push("negative squared worst-case error".to_string());
    }
    if !notes.is_empty() {
        row.warning = Some(notes.join("; "));
    }
    Ok(FsRun { row })
}

pub fn run_experiment(id: ExperimentId, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate(id)?;
    let report = match id {
        ExperimentId::Ex1 => run_ex1(config)?,
        ExperimentId::Ex2 => run_ex2(config)?,
        ExperimentId::Ex3 => run_ex3(config)?,
    };
    Ok(report.finish())
}

fn run_ex1(config: &ExperimentConfig) -> Result<ExperimentReport> {
    const D: usize = 3;
    let mut report = ExperimentReport::new(ExperimentId::Ex1);
    let mu = SymmetricMeasure::std_gaussian(D)?;
    for &j in config.j_values.iter().filter(|&&j| j > 0) {
        for &seed in &config.seeds {
            let label = format!("J={j} seed={seed}");
            let n = j * EX1_SET_SIZE;
            let start = Instant::now();
            let generators = match random_generators(j, D, RandomKind::Gaussian, seed, None) {
                Ok(g) => g,
                Err(e) => {
                    report.failures.push(RowFailure { label, error: e.to_string() });
                    continue;
                }
            };
            let t_generators = start.elapsed().as_secs_f64();
            let samples = gaussian_samples(n, D, seed);
            let sample_values: Vec<f64> = samples.iter().map(|x| integrand_ex1(x)).collect();

            let mut fit_warning = None;
            let length_scale = match config.length_scale {
                Some(l) => l,
                None => {
                    let fit = if config.fit_on_fss {
                        let nodes = SymmetricNodeSet::from_generators_default(&generators)?;
                        let pts: Vec<Vec<f64>> = nodes.points().map(|p| p.to_vec()).collect();
                        let vals: Vec<f64> = pts.iter().map(|x| integrand_ex1(x)).collect();
                        mle_lengthscale(&pts, &vals, &config.mle_grid)
                    } else {
                        mle_lengthscale(&samples, &sample_values, &config.mle_grid)
                    };
                    match fit {
                        Ok(fit) => {
                            if !fit.warnings.is_empty() {
                                fit_warning = Some(fit.warnings.join("; "));
                            }
                            fit.length_scale
                        }
                        Err(e) => {
                            report.failures.push(RowFailure { label, error: e.to_string() });
                            continue;
                        }
                    }
                }
            };
            let k = GaussianKernel::new(length_scale)?;

            match kmc_rule(&samples, &k, &mu) {
                Ok(kmc) => {
                    let estimate: f64 = kmc.weights.iter().zip(&sample_values).map(|(w, v)| w * v).sum();
                    let mut row = ReportRow::new("kmc", D, n, n, estimate, EX1_REFERENCE);
                    row.wce = Some(kmc.wce);
                    row.t_kernel_s = kmc.t_kernel_s;
                    row.t_weights_s = kmc.t_weights_s;
                    row.kernel_evals = (n as u64) * (n as u64);
                    row.length_scale = Some(length_scale);
                    row.seed = Some(seed);
                    row.warning = fit_warning.clone();
                    report.baselines.push(row);
                }
                Err(e) => report.failures.push(RowFailure {
                    label: format!("kmc {label}"),
                    error: e.to_string(),
                }),
            }

            match run_fs_rule(&generators, t_generators, &k, &mu, integrand_ex1, EX1_REFERENCE, config.node_cap) {
                Ok(FsRun { mut row }) => {
                    row.seed = Some(seed);
                    if let Some(w) = &fit_warning {
                        row.warning = Some(match row.warning {
                            Some(prev) => format!("{prev}; {w}"),
                            None => w.clone(),
                        });
                    }
                    report.rows.push(row);
                }
                Err(e) => report.failures.push(RowFailure { label, error: e.to_string() }),
            }
        }
    }
    Ok(report)
}

fn run_ex2(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(ExperimentId::Ex2);
    if config.q_max > EX2_DEFAULT_MAX_LEVEL {
        report.warnings.push(format!(
            "levels above {EX2_DEFAULT_MAX_LEVEL} need minutes to hours of kernel evaluations"
        ));
    }
    let k = GaussianKernel::new(config.length_scale.unwrap_or(EX2_LENGTH_SCALE))?;
    let mu = SymmetricMeasure::uniform_cube(EX2_DIM)?;
    let truth = true_integral_ex2();
    for q in 1..=config.q_max {
        let start = Instant::now();
        let generators = NestedBasis::clenshaw_curtis(q + 1).and_then(|b| sparse_grid_generators(q, EX2_DIM, &b));
        let t_generators = start.elapsed().as_secs_f64();
        let result = generators
            .and_then(|g| run_fs_rule(&g, t_generators, &k, &mu, integrand_ex2, truth, config.node_cap));
        match result {
            Ok(FsRun { mut row }) => {
                row.level = Some(q);
                report.rows.push(row);
            }
            Err(e) => report.failures.push(RowFailure {
                label: format!("q={q}"),
                error: e.to_string(),
            }),
        }
    }
    Ok(report)
}

fn run_ex3(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(ExperimentId::Ex3);
    if config.length_scale.is_none() {
        report.warnings.push("length scale set heuristically to the number of steps".into());
    }
    let q = config.level;
    let basis = gauss_hermite_basis(q)?;
    for &steps in &config.dims {
        let params = VasicekParams::benchmark(steps);
        let dim = params.dim();
        let truth = bond_closed_form(&params)?;
        let k = GaussianKernel::new(config.length_scale.unwrap_or(steps as f64))?;
        let mu = SymmetricMeasure::std_gaussian(dim)?;
        let f = |x: &[f64]| bond_integrand(&params, x);

        let start = Instant::now();
        let generators = sparse_grid_generators(q, dim, &basis).map(|mut g| {
            if config.drop_center {
                g.retain(|g| !g.is_origin());
            }
            g
        });
        let t_generators = start.elapsed().as_secs_f64();
        let result = generators.and_then(|g| run_fs_rule(&g, t_generators, &k, &mu, f, truth, config.node_cap));
        let n = match result {
            Ok(FsRun { mut row }) => {
                row.level = Some(q);
                let n = row.n;
                report.rows.push(row);
                n
            }
            Err(e) => {
                report.failures.push(RowFailure {
                    label: format!("d={steps}"),
                    error: e.to_string(),
                });
                continue;
            }
        };
        for &seed in &config.seeds {
            let estimate = monte_carlo(f, dim, n, MeasureKind::StandardGaussian, seed);
            let mut row = ReportRow::new("mc", dim, n, 0, estimate, truth);
            row.seed = Some(seed);
            report.baselines.push(row);
        }
    }
    Ok(report)
}
