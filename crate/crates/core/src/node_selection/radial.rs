//! Radius of the best fully symmetric set `[(λ, 0, …, 0)]` to add to the
//! centre, for the Gaussian kernel and the standard Gaussian measure.

use crate::error::{invalid, Error, Result};

/// `(e^{−λ²/2(1+ℓ²)} − e^{−λ²/2ℓ²}) / (1 − e^{−λ²/ℓ²})`, written in `u = λ²`.
pub fn radial_objective(lambda: f64, length_scale: f64) -> f64 {
    let u = lambda * lambda;
    let l2 = length_scale * length_scale;
    let a = 0.5 / (1.0 + l2);
    let b = 0.5 / l2;
    let num = -(-a * u).exp() * (-(b - a) * u).exp_m1();
    let den = -(-2.0 * b * u).exp_m1();
    num / den
}

/// Sign of the derivative of the objective in `u`, up to a positive factor.
fn objective_slope(u: f64, length_scale: f64) -> f64 {
    let l2 = length_scale * length_scale;
    let a = 0.5 / (1.0 + l2);
    let b = 0.5 / l2;
    let ea = (-a * u).exp();
    let eb = (-b * u).exp();
    let num = -ea * (-(b - a) * u).exp_m1();
    let dnum = -a * ea + b * eb;
    let den = -(-2.0 * b * u).exp_m1();
    let dden = 2.0 * b * eb * eb;
    dnum * den - num * dden
}

const SCAN_POINTS: usize = 4000;

/// Maximizer `λ* > 0` of [`radial_objective`].
///
/// A coarse scan over `(10⁻³ℓ, 10ℓ)` brackets the maximum; bisection on the
/// sign of the derivative then refines it to about machine precision.
pub fn optimal_radial_generator(length_scale: f64) -> Result<f64> {
    if !(length_scale.is_finite() && length_scale > 0.0) {
        return Err(invalid("length_scale", "must be positive and finite"));
    }
    let lo = 1e-3 * length_scale;
    let hi = 10.0 * length_scale;
    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / SCAN_POINTS as f64)
        .collect();
    let (best, _) = grid
        .iter()
        .map(|&l| radial_objective(l, length_scale))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    if best == 0 || best == SCAN_POINTS {
        return Err(Error::BracketFailure(format!(
            "maximum at scan boundary for length scale {length_scale}"
        )));
    }
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let slope = |l: f64| objective_slope(l * l, length_scale);
    if !(slope(a) > 0.0 && slope(b) < 0.0) {
        return Err(Error::BracketFailure(format!(
            "no sign change of the derivative for length scale {length_scale}"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if slope(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a <= 1e-15 * b {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{GaussianKernel, SymmetricMeasure};
    use crate::symmetry::GeneratorVector;
    use crate::weights::{make_rule, SymmetricNodeSet};

    #[test]
    fn matches_fine_grid_search() {
        for &l in &[0.3, 0.5, 1.0, 2.0, 4.0] {
            let star = optimal_radial_generator(l).unwrap();
            let step = 1e-5 * l;
            let best = (1..=1_000_000)
                .map(|i| i as f64 * step)
                .max_by(|x, y| radial_objective(*x, l).total_cmp(&radial_objective(*y, l)))
                .unwrap();
            assert!((star - best).abs() <= 2.0 * step, "l={l}: {star} vs {best}");
        }
    }

    #[test]
    fn known_value_for_unit_length_scale() {
        let star = optimal_radial_generator(1.0).unwrap();
        assert!((star - 1.29556).abs() < 1e-4, "{star}");
    }

    /// The rule on `{0} ∪ {±λ}` has its smallest worst-case error at `λ*`.
    #[test]
    fn minimizes_single_set_error() {
        for &l in &[0.5, 1.0, 2.0] {
            let k = GaussianKernel::new(l).unwrap();
            let mu = SymmetricMeasure::std_gaussian(1).unwrap();
            let wce = |lam: f64| {
                let gens = [GeneratorVector::origin(1).unwrap(), GeneratorVector::new(&[lam]).unwrap()];
                let nodes = SymmetricNodeSet::from_generators_default(&gens).unwrap();
                make_rule(nodes, &k, &mu).unwrap().wce()
            };
            let star = optimal_radial_generator(l).unwrap();
            let at_star = wce(star);
            for f in [0.98, 0.99, 1.01, 1.02] {
                assert!(wce(star * f) >= at_star - 1e-14, "l={l} f={f}");
            }
        }
    }

    #[test]
    fn rejects_bad_length_scale() {
        assert!(optimal_radial_generator(0.0).is_err());
        assert!(optimal_radial_generator(f64::NAN).is_err());
    }
}
