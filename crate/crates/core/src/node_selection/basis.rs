//! Nested, symmetric one-dimensional point sequences `X¹ ⊂ X² ⊂ …`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::symmetry::DEFAULT_SET_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BasisKind {
    ClenshawCurtis,
    /// Roots of the probabilists' Hermite polynomial of degree `2q + 1`.
    GaussHermite { q: usize },
}

/// Levels of a nested basis; `levels[i - 1]` holds `Xⁱ`, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedBasis {
    kind: BasisKind,
    levels: Vec<Vec<f64>>,
}

impl NestedBasis {
    /// Clenshaw–Curtis levels `1..=num_levels`.
    pub fn clenshaw_curtis(num_levels: usize) -> Result<Self> {
        if num_levels == 0 {
            return Err(invalid("levels", "at least one level is required"));
        }
        let mut levels: Vec<Vec<f64>> = Vec::with_capacity(num_levels);
        for i in 1..=num_levels {
            let mut points = cc_formula_points(i)?;
            // Shared points must be bit-identical across levels.
            if let Some(prev) = levels.last() {
                for p in points.iter_mut() {
                    if let Some(&q) = prev.iter().find(|&&q| (q - *p).abs() <= 1e-14) {
                        *p = q;
                    }
                }
            }
            levels.push(points);
        }
        Ok(Self {
            kind: BasisKind::ClenshawCurtis,
            levels,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// `Xⁱ` for `i ≥ 1`.
    pub fn level(&self, i: usize) -> &[f64] {
        &self.levels[i - 1]
    }

    /// Non-negative points of `Xⁱ`, ascending (always starts with 0).
    pub fn nonnegative(&self, i: usize) -> Vec<f64> {
        self.level(i).iter().copied().filter(|&x| x >= 0.0).collect()
    }
}

fn cc_formula_points(i: usize) -> Result<Vec<f64>> {
    if i == 0 {
        return Err(invalid("level", "levels start at 1"));
    }
    if i == 1 {
        return Ok(vec![0.0]);
    }
    if i > 26 {
        return Err(Error::TooManyNodes {
            count: u64::MAX,
            cap: DEFAULT_SET_CAP,
        });
    }
    let intervals = 1u64 << (i - 1);
    let m = intervals + 1;
    if m > DEFAULT_SET_CAP {
        return Err(Error::TooManyNodes {
            count: m,
            cap: DEFAULT_SET_CAP,
        });
    }
    // x_j = -cos(π (j-1)/(m-1)); the non-negative half is cos(π t / (m-1))
    // for t = 0..=(m-1)/2. t / (m-1) is an exact dyadic fraction, so points
    // shared between levels are computed from identical arguments.
    let half = intervals / 2;
    let mut positive: Vec<f64> = (0..half)
        .map(|t| (std::f64::consts::PI * (t as f64 / intervals as f64)).cos())
        .collect();
    positive.reverse();
    let mut points: Vec<f64> = positive.iter().rev().map(|x| -x).collect();
    points.push(0.0);
    points.extend(positive);
    Ok(points)
}

/// Clenshaw–Curtis level `Xⁱ`: `{0}` for `i = 1`, otherwise the
/// `2^(i−1) + 1` Chebyshev extrema, exactly symmetric, ascending.
pub fn clenshaw_curtis_level(i: usize) -> Result<Vec<f64>> {
    if i == 0 {
        return Err(invalid("level", "levels start at 1"));
    }
    Ok(NestedBasis::clenshaw_curtis(i)?.levels.pop().unwrap_or_default())
}

/// Normalized probabilists' Hermite recurrence `p_k = He_k / sqrt(k!)`.
/// Returns `(p_n(x), p_{n−1}(x))`.
fn hermite_normalized(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Roots of `He_n`, ascending, exactly symmetric, with an exact zero for odd `n`.
///
/// Golub–Welsch eigenvalues of the Jacobi matrix give the starting points;
/// Newton iterations on the normalized three-term recurrence polish them.
pub fn hermite_roots(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    guesses.sort_by(f64::total_cmp);

    let mut positive = Vec::with_capacity(n / 2);
    for &guess in guesses.iter().skip(n - n / 2) {
        let mut x = guess.abs();
        let mut converged = false;
        for _ in 0..100 {
            let (p, q) = hermite_normalized(n, x);
            let dp = (n as f64).sqrt() * q;
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-15 * x.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged || !x.is_finite() || x <= 0.0 {
            return Err(Error::RootFinding { degree: n });
        }
        positive.push(x);
    }
    positive.sort_by(f64::total_cmp);
    if positive.windows(2).any(|w| w[1] - w[0] <= 1e-10) {
        return Err(Error::RootFinding { degree: n });
    }

    let mut roots: Vec<f64> = positive.iter().rev().map(|x| -x).collect();
    if n % 2 == 1 {
        roots.push(0.0);
    }
    roots.extend(positive);
    Ok(roots)
}

/// Nested Gauss–Hermite levels for a sparse grid of level `q`:
/// `Xⁱ` is the `2i − 1` roots of `He_{2q+1}` smallest in magnitude, `i = 1..=q+1`.
pub fn gauss_hermite_basis(q: usize) -> Result<NestedBasis> {
    if q == 0 {
        return Err(invalid("q", "must be at least 1"));
    }
    let roots = hermite_roots(2 * q + 1)?;
    let positive: Vec<f64> = roots[q + 1..].to_vec();
    let levels = (1..=q + 1)
        .map(|i| {
            let pos = &positive[..i - 1];
            let mut level: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
            level.push(0.0);
            level.extend_from_slice(pos);
            level
        })
        .collect();
    Ok(NestedBasis {
        kind: BasisKind::GaussHermite { q },
        levels,
    })
}
