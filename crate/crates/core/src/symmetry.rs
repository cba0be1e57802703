//! Fully symmetric sets: orbits of a generator vector under all coordinate
//! permutations and sign changes (the hyperoctahedral group).
//!
//! A generator is kept in canonical form: non-negative entries sorted in
//! descending order with zeros trailing. Expansion enumerates the orbit
//! without duplicates by walking sign patterns (how many copies of each
//! distinct non-zero value are negated) and, for each pattern, the unique
//! permutations of the resulting multiset.

use std::fmt;

use crate::error::{Error, Result};

/// Default absolute tolerance for zero-snapping and merging generator values.
pub const CANON_TOL: f64 = 1e-12;

/// Default hard cap on the number of points in one expanded set.
pub const DEFAULT_SET_CAP: u64 = 1 << 25;

/// Canonical generator vector `λ`: non-negative, sorted descending.
#[derive(Clone)]
pub struct GeneratorVector {
    values: Vec<f64>,
    multiplicities: Vec<(f64, usize)>,
    zero_count: usize,
}

impl GeneratorVector {
    /// Canonicalizes `raw` with the default tolerance.
    pub fn new(raw: &[f64]) -> Result<Self> {
        canonicalize_generator(raw, CANON_TOL)
    }

    /// The all-zero generator in `dim` dimensions.
    pub fn origin(dim: usize) -> Result<Self> {
        Self::new(&vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Distinct non-zero values with their multiplicities, largest first.
    pub fn multiplicities(&self) -> &[(f64, usize)] {
        &self.multiplicities
    }

    pub fn zero_count(&self) -> usize {
        self.zero_count
    }

    /// Number of non-zero entries (`m`).
    pub fn nonzero_count(&self) -> usize {
        self.dim() - self.zero_count
    }

    pub fn is_origin(&self) -> bool {
        self.zero_count == self.dim()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Element-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Lexicographic order on the value lists; used for deterministic sorting.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dim().cmp(&other.dim()).then_with(|| {
            for (a, b) in self.values.iter().zip(&other.values) {
                match a.total_cmp(b) {
                    std::cmp::Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

impl PartialEq for GeneratorVector {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, CANON_TOL)
    }
}

impl fmt::Debug for GeneratorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Sorts, zero-snaps and merges near-equal entries of `raw`.
///
/// Entries within `tol` of each other are merged onto the value of the group
/// member that appears first in `raw`. Merging is repeated until nothing
/// changes, so the result is a fixed point and canonicalization is idempotent.
pub fn canonicalize_generator(raw: &[f64], tol: f64) -> Result<GeneratorVector> {
    if raw.is_empty() {
        return Err(Error::InvalidDimension(0));
    }
    let mut entries = Vec::with_capacity(raw.len());
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() || value < -tol {
            return Err(Error::InvalidGenerator { index, value });
        }
        let snapped = if value.abs() <= tol { 0.0 } else { value };
        entries.push((index, snapped));
    }

    loop {
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut changed = false;
        let mut start = 0;
        while start < entries.len() {
            let top = entries[start].1;
            let mut end = start + 1;
            while end < entries.len() && top - entries[end].1 <= tol {
                end += 1;
            }
            let group = &mut entries[start..end];
            let rep = group.iter().min_by_key(|e| e.0).map(|e| e.1).unwrap_or(top);
            for e in group.iter_mut() {
                if e.1.to_bits() != rep.to_bits() {
                    e.1 = rep;
                    changed = true;
                }
            }
            start = end;
        }
        if !changed {
            break;
        }
    }

    let values: Vec<f64> = entries.iter().map(|e| e.1).collect();
    let mut multiplicities: Vec<(f64, usize)> = Vec::new();
    let mut zero_count = 0;
    for &v in &values {
        if v == 0.0 {
            zero_count += 1;
        } else {
            match multiplicities.last_mut() {
                Some((last, count)) if *last == v => *count += 1,
                _ => multiplicities.push((v, 1)),
            }
        }
    }
    Ok(GeneratorVector {
        values,
        multiplicities,
        zero_count,
    })
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    u64::try_from(acc).ok()
}

/// Number of points in `[λ]`: `2^m d! / (m₀! m₁! ⋯ m_l!)`.
///
/// The multinomial coefficient is built as a product of binomials, so an
/// overflow error is returned only when the true cardinality does not fit in
/// a `u64`. For `d ≤ 20` with at most 9 non-zero entries the value is below
/// `2^9 · 20!/11! ≈ 3.1e13`, far from the limit.
pub fn cardinality(gen: &GeneratorVector) -> Result<u64> {
    let mut remaining = gen.dim() as u64;
    let mut total: u64 = 1;
    let groups = gen
        .multiplicities
        .iter()
        .map(|&(_, c)| c)
        .chain(std::iter::once(gen.zero_count));
    for count in groups {
        let b = binomial(remaining, count as u64).ok_or(Error::CardinalityOverflow)?;
        total = total.checked_mul(b).ok_or(Error::CardinalityOverflow)?;
        remaining -= count as u64;
    }
    let signs = 1u64
        .checked_shl(gen.nonzero_count() as u32)
        .filter(|_| gen.nonzero_count() < 64)
        .ok_or(Error::CardinalityOverflow)?;
    total.checked_mul(signs).ok_or(Error::CardinalityOverflow)
}

/// An expanded fully symmetric set `[λ]`, stored as a flat row-major buffer.
#[derive(Debug, Clone)]
pub struct FullySymmetricSet {
    generator: GeneratorVector,
    points: Vec<f64>,
}

impl FullySymmetricSet {
    pub fn generator(&self) -> &GeneratorVector {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn size(&self) -> usize {
        self.points.len() / self.dim()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.points[i * d..(i + 1) * d]
    }

    /// The first point in the deterministic order; always the generator itself.
    pub fn representative(&self) -> &[f64] {
        self.point(0)
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.points.chunks_exact(self.dim())
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.points
    }

    /// Exact membership test.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && self.points().any(|q| q == p)
    }
}

/// Expands `gen` with the default size cap.
pub fn expand(gen: &GeneratorVector) -> Result<FullySymmetricSet> {
    expand_with_cap(gen, DEFAULT_SET_CAP)
}

/// Expands `gen` into its orbit.
///
/// Points are ordered by sign pattern (the number of negated copies of each
/// distinct value, first value varying slowest) and then by the
/// lexicographic rank of the permutation of symbol indices. The first point
/// is always the generator itself.
pub fn expand_with_cap(gen: &GeneratorVector, cap: u64) -> Result<FullySymmetricSet> {
    let size = cardinality(gen)?;
    if size > cap {
        return Err(Error::SetTooLarge { size, cap });
    }
    let d = gen.dim();
    let groups = gen.multiplicities();
    let mut points = Vec::with_capacity(size as usize * d);

    // Number of negated entries per distinct value.
    let mut negated = vec![0usize; groups.len()];
    let mut symbols: Vec<f64> = Vec::with_capacity(2 * groups.len() + 1);
    let mut ids: Vec<u16> = Vec::with_capacity(d);
    loop {
        symbols.clear();
        ids.clear();
        // The first `neg` copies of each value are negated. Symbol ids
        // increase along the vector, so the starting arrangement is the
        // smallest permutation and, for the all-positive pattern, equals the
        // generator itself.
        for (&(value, count), &neg) in groups.iter().zip(&negated) {
            if neg > 0 {
                let neg_id = symbols.len() as u16;
                symbols.push(-value);
                ids.extend(std::iter::repeat_n(neg_id, neg));
            }
            let pos_id = symbols.len() as u16;
            symbols.push(value);
            ids.extend(std::iter::repeat_n(pos_id, count - neg));
        }
        if gen.zero_count() > 0 {
            let zero_id = symbols.len() as u16;
            symbols.push(0.0);
            ids.extend(std::iter::repeat_n(zero_id, gen.zero_count()));
        }

        loop {
            points.extend(ids.iter().map(|&s| symbols[s as usize]));
            if !next_permutation(&mut ids) {
                break;
            }
        }

        // Advance the sign pattern; the last group varies fastest.
        let mut g = groups.len();
        loop {
            if g == 0 {
                debug_assert_eq!(points.len(), size as usize * d);
                return Ok(FullySymmetricSet {
                    generator: gen.clone(),
                    points,
                });
            }
            g -= 1;
            if negated[g] < groups[g].1 {
                negated[g] += 1;
                break;
            }
            negated[g] = 0;
        }
    }
}

/// Rearranges `ids` into the next lexicographically greater permutation.
/// Returns `false` once the sequence is the last (non-increasing) one.
/// Repeated entries are handled, so only distinct arrangements are visited.
pub(crate) fn next_permutation<T: Ord>(ids: &mut [T]) -> bool {
    let n = ids.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && ids[i - 1] >= ids[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while ids[j] <= ids[i - 1] {
        j -= 1;
    }
    ids.swap(i - 1, j);
    ids[i..].reverse();
    true
}

/// `f[λ]`: the sum of `f` over all points of the set, in point order.
pub fn sum_over_set<F>(f: F, set: &FullySymmetricSet) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut acc = 0.0;
    for p in set.points() {
        let value = f(p);
        if !value.is_finite() {
            return Err(Error::NonFiniteEvaluation {
                point: p.to_vec(),
                value,
            });
        }
        acc += value;
    }
    Ok(acc)
}
