//! Test integrands with known or closely approximated integrals.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `∫ f₁ dN(0, I₃)` to about twelve digits, from a converged composite
/// Gauss–Legendre product rule on a truncated domain.
pub const EX1_REFERENCE: f64 = 0.389_386_170_872_07;

/// Length scale of the Gaussian bump in [`integrand_ex2`].
pub const EX2_LENGTH_SCALE: f64 = 0.8;
pub const EX2_DIM: usize = 11;

/// `exp(sin(5‖x‖)² − (x₁² + 0.5x₂² + 2x₃⁴))` on ℝ³.
pub fn integrand_ex1(x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), 3);
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let s = (5.0 * r).sin();
    (s * s - (x[0] * x[0] + 0.5 * x[1] * x[1] + 2.0 * x[2].powi(4))).exp()
}

/// Centre of the bump: 11 evenly spaced points on `[0.2, 0.5]`.
pub fn ex2_center() -> [f64; EX2_DIM] {
    std::array::from_fn(|i| 0.2 + 0.3 * i as f64 / (EX2_DIM - 1) as f64)
}

/// `exp(−‖x − x_f‖² / 2ℓ_f²)` on `[−1, 1]¹¹`.
pub fn integrand_ex2(x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), EX2_DIM);
    let c = ex2_center();
    let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
    (-r2 / (2.0 * EX2_LENGTH_SCALE * EX2_LENGTH_SCALE)).exp()
}

/// Integral of [`integrand_ex2`] against the uniform probability measure on
/// the cube, as a product of one-dimensional erf expressions.
pub fn true_integral_ex2() -> f64 {
    let l = EX2_LENGTH_SCALE;
    let s = l * std::f64::consts::SQRT_2;
    ex2_center()
        .iter()
        .map(|&c| {
            0.5 * l * (std::f64::consts::PI / 2.0).sqrt() * (libm::erf((1.0 - c) / s) + libm::erf((1.0 + c) / s))
        })
        .product()
}

/// Vasicek short-rate model discretized with `steps` Euler steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VasicekParams {
    pub kappa: f64,
    pub theta: f64,
    pub sigma: f64,
    pub r0: f64,
    pub horizon: f64,
    /// Number of Euler steps `d`; the integrand lives in `d − 1` dimensions.
    pub steps: usize,
}

impl VasicekParams {
    /// Standard benchmark parameters with a five-year horizon.
    pub fn benchmark(steps: usize) -> Self {
        Self {
            kappa: 0.1817303,
            theta: 0.0825398957,
            sigma: 0.0125901,
            r0: 0.021673,
            horizon: 5.0,
            steps,
        }
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Dimension of the integration domain.
    pub fn dim(&self) -> usize {
        self.steps - 1
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa", self.kappa),
            ("theta", self.theta),
            ("sigma", self.sigma),
            ("r0", self.r0),
            ("horizon", self.horizon),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, "must be positive and finite"));
            }
        }
        if self.steps < 2 {
            return Err(invalid("steps", "at least two Euler steps are required"));
        }
        if self.kappa * self.dt() >= 1.0 {
            return Err(invalid("steps", "kappa * dt must be below 1"));
        }
        Ok(())
    }
}

/// `exp(−Δt Σ_{k=0}^{d−1} r_k)` along the Euler path driven by `x ∈ ℝ^{d−1}`.
pub fn bond_integrand(p: &VasicekParams, x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), p.dim());
    let dt = p.dt();
    let vol = p.sigma * dt.sqrt();
    let mut r = p.r0;
    let mut sum = r;
    for &xk in x {
        r += p.kappa * (p.theta - r) * dt + vol * xk;
        sum += r;
    }
    (-dt * sum).exp()
}

/// Exact expectation of [`bond_integrand`] under the standard normal measure.
pub fn bond_closed_form(p: &VasicekParams) -> Result<f64> {
    p.validate()?;
    let d = p.steps;
    let dt = p.dt();
    let a = 1.0 - p.kappa * dt;
    // β_k = Σ_{j=1}^k a^{j−1}
    let mut beta = 0.0;
    let mut power = 1.0;
    let mut gamma = 0.0;
    for k in 1..=d {
        beta += power;
        power *= a;
        if k < d {
            let bs = beta * p.sigma * dt;
            gamma += beta * p.kappa * p.theta * dt - 0.5 * bs * bs;
        }
    }
    Ok((-(gamma + beta * p.r0) * p.horizon / d as f64).exp())
}
