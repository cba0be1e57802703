//! Length-scale selection by Gaussian-process marginal likelihood.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::kernels::GaussianKernel;

/// Diagonal jitter added to every kernel matrix.
pub const MLE_JITTER: f64 = 1e-10;
/// Largest supported number of data points.
pub const MLE_MAX_NODES: usize = 3000;

#[derive(Debug, Clone, Serialize)]
pub struct MleFit {
    pub length_scale: f64,
    pub log_likelihood: f64,
    /// `(ℓ, log L)` for every candidate; `None` where the factorization failed.
    pub surface: Vec<(f64, Option<f64>)>,
    pub warnings: Vec<String>,
}

/// Cholesky factor of `K + jitter·I` for the unit-scale Gaussian kernel.
pub(crate) fn jittered_cholesky(nodes: &[Vec<f64>], length_scale: f64) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let k = GaussianKernel::new(length_scale).ok()?;
    let n = nodes.len();
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let r2: f64 = nodes[i].iter().zip(&nodes[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            let v = k.of_sq_dist(r2);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
        gram[(j, j)] += MLE_JITTER;
    }
    gram.cholesky()
}

/// Log marginal likelihood `−½ yᵀK⁻¹y − ½ log|K| − (n/2) log 2π`.
pub fn log_marginal_likelihood(nodes: &[Vec<f64>], values: &[f64], length_scale: f64) -> Option<f64> {
    let chol = jittered_cholesky(nodes, length_scale)?;
    let y = DVector::from_column_slice(values);
    let alpha = chol.solve(&y);
    let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let n = values.len() as f64;
    let ll = -0.5 * y.dot(&alpha) - 0.5 * log_det - 0.5 * n * (2.0 * std::f64::consts::PI).ln();
    ll.is_finite().then_some(ll)
}

/// Grid candidate with the largest marginal likelihood. Ties go to the
/// smallest length scale.
pub fn mle_lengthscale(nodes: &[Vec<f64>], values: &[f64], grid: &[f64]) -> Result<MleFit> {
    if nodes.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    if nodes.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            got: values.len(),
        });
    }
    if nodes.len() > MLE_MAX_NODES {
        return Err(Error::TooManyNodes {
            count: nodes.len() as u64,
            cap: MLE_MAX_NODES as u64,
        });
    }
    if grid.is_empty() || grid.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(invalid("grid", "needs positive finite candidates"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();

    let surface: Vec<(f64, Option<f64>)> = sorted
        .par_iter()
        .map(|&l| (l, log_marginal_likelihood(nodes, values, l)))
        .collect();

    let mut warnings = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    for &(l, ll) in &surface {
        match ll {
            None => warnings.push(format!("factorization failed at length scale {l}; skipped")),
            Some(v) => {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((l, v));
                }
            }
        }
    }
    let (length_scale, log_likelihood) = best.ok_or(Error::AllCandidatesFailed)?;
    if values.iter().all(|&v| v == 0.0) {
        warnings.push("all values are zero; the likelihood only reflects the determinant".into());
    }
    let ok: Vec<f64> = surface.iter().filter(|s| s.1.is_some()).map(|s| s.0).collect();
    if ok.len() > 1 && (length_scale == ok[0] || length_scale == ok[ok.len() - 1]) {
        warnings.push(format!("maximum at the grid boundary ({length_scale})"));
    }
    Ok(MleFit {
        length_scale,
        log_likelihood,
        surface,
        warnings,
    })
}

/// `count` log-spaced values in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
