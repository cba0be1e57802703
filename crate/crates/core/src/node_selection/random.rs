//! Randomly drawn generator vectors.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::symmetry::GeneratorVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    /// Entries `|N(0, 1)|`.
    Gaussian,
    /// Entries `|U(−1, 1)|`.
    Uniform,
}

impl std::str::FromStr for RandomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "normal" => Ok(Self::Gaussian),
            "uniform" => Ok(Self::Uniform),
            other => Err(invalid("random kind", format!("unknown '{other}'"))),
        }
    }
}

const MAX_REDRAWS: usize = 1000;

/// `count` distinct canonical generators in `d` dimensions.
///
/// Entries below `truncate_below` are set to zero. A draw that duplicates an
/// earlier generator is replaced by a fresh one. Deterministic in `seed`.
pub fn random_generators(
    count: usize,
    d: usize,
    kind: RandomKind,
    seed: u64,
    truncate_below: Option<f64>,
) -> Result<Vec<GeneratorVector>> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if let Some(t) = truncate_below {
        if !(t.is_finite() && t >= 0.0) {
            return Err(invalid("truncate_below", "must be finite and non-negative"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform = Uniform::new(-1.0f64, 1.0).expect("valid range");
    let draw = |rng: &mut ChaCha8Rng| -> f64 {
        let v: f64 = match kind {
            RandomKind::Gaussian => StandardNormal.sample(rng),
            RandomKind::Uniform => uniform.sample(rng),
        };
        let v = v.abs();
        match truncate_below {
            Some(t) if v < t => 0.0,
            _ => v,
        }
    };

    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut raw = vec![0.0; d];
    let mut redraws = 0;
    while out.len() < count {
        raw.iter_mut().for_each(|v| *v = draw(&mut rng));
        let g = GeneratorVector::new(&raw)?;
        let key: Vec<u64> = g.values().iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            out.push(g);
        } else {
            redraws += 1;
            if redraws > MAX_REDRAWS {
                return Err(invalid(
                    "count",
                    format!("could not draw {count} distinct generators"),
                ));
            }
        }
    }
    Ok(out)
}

/// Uniform random point in `[lo, hi]^d`; used to seed test inputs.
pub fn random_point(rng: &mut impl Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(lo..=hi)).collect()
}
