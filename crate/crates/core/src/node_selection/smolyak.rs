//! Sparse grids `H(q, d)` written as unions of fully symmetric sets.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};
use crate::node_selection::NestedBasis;
use crate::symmetry::{cardinality, GeneratorVector};

/// Non-increasing compositions of `total` into `parts` positive parts,
/// in lexicographically descending order.
pub fn nonincreasing_compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn recurse(remaining: usize, parts: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        // Each of the remaining parts needs at least 1.
        if remaining < parts {
            return;
        }
        let hi = max.min(remaining - (parts - 1));
        for v in (1..=hi).rev() {
            // The rest must fit under v.
            if v * parts < remaining {
                break;
            }
            prefix.push(v);
            recurse(remaining - v, parts - 1, v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        recurse(total, parts, total, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

/// Generator vectors whose fully symmetric sets partition `H(q, d)`.
///
/// For every non-increasing multi-index `α` with `|α| = d + q`, emits the
/// canonical form of each `λ` with `λ_j` drawn from the non-negative part of
/// `X^{α_j}`. Results are deduplicated by exact value and returned in
/// ascending lexicographic order, so the origin comes first.
pub fn sparse_grid_generators(q: usize, d: usize, basis: &NestedBasis) -> Result<Vec<GeneratorVector>> {
    if q == 0 {
        return Err(invalid("q", "must be at least 1"));
    }
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if basis.num_levels() < q + 1 {
        return Err(invalid(
            "basis",
            format!("needs {} levels, has {}", q + 1, basis.num_levels()),
        ));
    }
    let nonneg: Vec<Vec<f64>> = (1..=q + 1).map(|i| basis.nonnegative(i)).collect();
    let mut unique: BTreeMap<Vec<u64>, GeneratorVector> = BTreeMap::new();
    let mut raw = vec![0.0; d];

    for alpha in nonincreasing_compositions(d + q, d) {
        // Only the leading entries with α_j > 1 can be non-zero.
        let active = alpha.iter().take_while(|&&a| a > 1).count();
        let choices: Vec<&[f64]> = alpha[..active].iter().map(|&a| nonneg[a - 1].as_slice()).collect();
        let mut index = vec![0usize; active];
        'product: loop {
            raw.iter_mut().for_each(|v| *v = 0.0);
            for (j, &c) in index.iter().enumerate() {
                raw[j] = choices[j][c];
            }
            let g = GeneratorVector::new(&raw)?;
            let key: Vec<u64> = g.values().iter().map(|v| v.to_bits()).collect();
            unique.entry(key).or_insert(g);

            // Odometer step, last position fastest.
            for j in (0..active).rev() {
                index[j] += 1;
                if index[j] < choices[j].len() {
                    continue 'product;
                }
                index[j] = 0;
            }
            break;
        }
    }
    let mut generators: Vec<GeneratorVector> = unique.into_values().collect();
    generators.sort_by(|a, b| a.lex_cmp(b));
    Ok(generators)
}

/// Total node count `Σ #[λ]` without expanding anything.
pub fn count_nodes(generators: &[GeneratorVector]) -> Result<u64> {
    generators.iter().try_fold(0u64, |acc, g| {
        acc.checked_add(cardinality(g)?)
            .ok_or(Error::CardinalityOverflow)
    })
}

/// [`sparse_grid_generators`] with a total-node cap checked before expansion.
pub fn sparse_grid_generators_capped(
    q: usize,
    d: usize,
    basis: &NestedBasis,
    node_cap: u64,
) -> Result<Vec<GeneratorVector>> {
    let generators = sparse_grid_generators(q, d, basis)?;
    let count = count_nodes(&generators)?;
    if count > node_cap {
        return Err(Error::TooManyNodes {
            count,
            cap: node_cap,
        });
    }
    Ok(generators)
}
