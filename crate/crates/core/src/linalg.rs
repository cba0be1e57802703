//! Dense LU factorization with partial pivoting for the small row-sum system.

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data has wrong length");
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// `PA = LU`, stored compactly.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
    smallest_pivot: (usize, f64),
}

/// Factorizes `a`. A pivot whose magnitude falls below
/// `rel_pivot_tol · max|a|` is reported as singular.
pub fn lu_factor(a: &DenseMatrix, rel_pivot_tol: f64) -> Result<LuFactors> {
    let n = a.size();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let threshold = rel_pivot_tol * a.max_abs();
    let mut smallest_pivot = (0, f64::INFINITY);
    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, lu.get(i, k)))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .expect("non-empty column");
        if pivot.is_nan() || pivot.abs() <= threshold {
            return Err(Error::SingularSystem {
                pivot_index: k,
                pivot,
            });
        }
        if pivot.abs() < smallest_pivot.1.abs() {
            smallest_pivot = (k, pivot);
        }
        if p != k {
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        for i in k + 1..n {
            let factor = lu.get(i, k) / pivot;
            lu.set(i, k, factor);
            if factor != 0.0 {
                for j in k + 1..n {
                    let v = lu.get(i, j) - factor * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
        }
    }
    Ok(LuFactors {
        lu,
        perm,
        smallest_pivot,
    })
}

impl LuFactors {
    /// Index and value of the pivot with the smallest magnitude.
    pub fn smallest_pivot(&self) -> (usize, f64) {
        self.smallest_pivot
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.size();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu.get(i, j) * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu.get(i, j) * x[j]).sum();
            x[i] = (x[i] - s) / self.lu.get(i, i);
        }
        x
    }

    /// `‖A⁻¹‖₁`, from the explicit inverse (fine for a few hundred rows).
    pub fn inverse_norm_1(&self) -> f64 {
        let n = self.lu.size();
        let mut col_sums = vec![0.0; n];
        let mut e = vec![0.0; n];
        for (j, sum) in col_sums.iter_mut().enumerate() {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            *sum = self.solve(&e).iter().map(|v| v.abs()).sum();
        }
        col_sums.into_iter().fold(0.0, f64::max)
    }
}
