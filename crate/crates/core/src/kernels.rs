//! The Gaussian kernel, the two fully symmetric measures it is paired with,
//! and the closed-form kernel means and initial errors of each pair.

use std::f64::consts::{PI, SQRT_2};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A positive-definite kernel on ℝ^d.
pub trait Kernel {
    fn eval(&self, x: &[f64], y: &[f64]) -> f64;
}

/// `k(x, x') = scale · exp(−‖x − x'‖² / 2ℓ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianKernel {
    length_scale: f64,
    scale: f64,
}

impl GaussianKernel {
    pub fn new(length_scale: f64) -> Result<Self> {
        Self::with_scale(length_scale, 1.0)
    }

    pub fn with_scale(length_scale: f64, scale: f64) -> Result<Self> {
        if !(length_scale > 0.0 && length_scale.is_finite()) {
            return Err(invalid("length_scale", format!("{length_scale} is not positive")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale", format!("{scale} is not positive")));
        }
        Ok(Self {
            length_scale,
            scale,
        })
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Checked evaluation.
    pub fn try_eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        Ok(self.eval(x, y))
    }

    /// Kernel value as a function of the squared distance.
    #[inline]
    pub fn of_sq_dist(&self, r2: f64) -> f64 {
        self.scale * (-r2 / (2.0 * self.length_scale * self.length_scale)).exp()
    }
}

impl Kernel for GaussianKernel {
    #[inline]
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        self.of_sq_dist(r2)
    }
}

pub fn kernel_eval(k: &GaussianKernel, x: &[f64], y: &[f64]) -> Result<f64> {
    k.try_eval(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// Standard normal distribution on ℝ^d.
    #[serde(rename = "std_gaussian")]
    StandardGaussian,
    /// Normalized uniform measure on `[−1, 1]^d`.
    UniformCube,
}

impl MeasureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureKind::StandardGaussian => "std_gaussian",
            MeasureKind::UniformCube => "uniform_cube",
        }
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "std_gaussian" | "gaussian" => Ok(MeasureKind::StandardGaussian),
            "uniform_cube" | "uniform" => Ok(MeasureKind::UniformCube),
            other => Err(invalid("measure", format!("unknown measure {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricMeasure {
    pub kind: MeasureKind,
    pub dim: usize,
}

impl SymmetricMeasure {
    pub fn new(kind: MeasureKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { kind, dim })
    }

    pub fn std_gaussian(dim: usize) -> Result<Self> {
        Self::new(MeasureKind::StandardGaussian, dim)
    }

    pub fn uniform_cube(dim: usize) -> Result<Self> {
        Self::new(MeasureKind::UniformCube, dim)
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        match self.kind {
            MeasureKind::StandardGaussian => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                (2.0 * PI).powf(-(self.dim as f64) / 2.0) * (-r2 / 2.0).exp()
            }
            MeasureKind::UniformCube => {
                if x.iter().all(|v| v.abs() <= 1.0) {
                    0.5f64.powi(self.dim as i32)
                } else {
                    0.0
                }
            }
        }
    }
}

/// One coordinate factor of the uniform-cube kernel mean, without the
/// `sqrt(πℓ²/8)` prefactor.
fn uniform_factor(x: f64, ell: f64) -> f64 {
    let s = ell * SQRT_2;
    libm::erf((x + 1.0) / s) - libm::erf((x - 1.0) / s)
}

/// `k_μ(x) = ∫ k(x, x') dμ(x')`.
pub fn kernel_mean(k: &GaussianKernel, mu: &SymmetricMeasure, x: &[f64]) -> Result<f64> {
    if x.len() != mu.dim {
        return Err(Error::DimensionMismatch {
            expected: mu.dim,
            got: x.len(),
        });
    }
    let ell2 = k.length_scale * k.length_scale;
    let d = mu.dim as f64;
    let value = match mu.kind {
        MeasureKind::StandardGaussian => {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            (ell2 / (1.0 + ell2)).powf(d / 2.0) * (-r2 / (2.0 * (1.0 + ell2))).exp()
        }
        MeasureKind::UniformCube => {
            let pre = (PI * ell2 / 8.0).sqrt();
            x.iter()
                .map(|&xi| pre * uniform_factor(xi, k.length_scale))
                .product()
        }
    };
    Ok(k.scale * value)
}

/// `μ(k_μ) = ∬ k dμ dμ`, the squared worst-case error of the empty rule.
pub fn initial_error_sq(k: &GaussianKernel, mu: &SymmetricMeasure) -> Result<f64> {
    let ell = k.length_scale;
    let ell2 = ell * ell;
    let d = mu.dim as f64;
    let value = match mu.kind {
        MeasureKind::StandardGaussian => (ell2 / (2.0 + ell2)).powf(d / 2.0),
        MeasureKind::UniformCube => {
            let one_dim = (PI * ell2 / 8.0).sqrt()
                * ((2.0 * ell2 / PI).sqrt() * ((-2.0 / ell2).exp() - 1.0)
                    + 2.0 * libm::erf(SQRT_2 / ell));
            one_dim.powi(mu.dim as i32)
        }
    };
    Ok(k.scale * value)
}

/// Applies a signed permutation: `(Px)_i = sign_i · x_{perm_i}`.
pub fn apply_signed_permutation(perm: &[usize], signs: &[f64], x: &[f64]) -> Vec<f64> {
    perm.iter().zip(signs).map(|(&p, &s)| s * x[p]).collect()
}

pub(crate) fn random_signed_permutation(rng: &mut impl Rng, dim: usize) -> (Vec<usize>, Vec<f64>) {
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let signs = (0..dim)
        .map(|_| if rng.random_bool(0.5) { -1.0 } else { 1.0 })
        .collect();
    (perm, signs)
}

/// Randomized check that `k(Px, Px') = k(x, x')` for signed permutations `P`.
///
/// Draws `samples` triples `(x, x', P)` with coordinates in `[−2, 2]` and
/// accepts when every pair agrees to `1e−12`.
pub fn is_fully_symmetric_kernel<K: Kernel>(k: &K, dim: usize, samples: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples.max(1)).all(|_| {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let (perm, signs) = random_signed_permutation(&mut rng, dim);
        let px = apply_signed_permutation(&perm, &signs, &x);
        let py = apply_signed_permutation(&perm, &signs, &y);
        (k.eval(&px, &py) - k.eval(&x, &y)).abs() <= 1e-12
    })
}
