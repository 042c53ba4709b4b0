//! Compressed-row complex matrices for nearest-neighbor lattice operators.

use num_complex::Complex64;
use rayon::prelude::*;

type C = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C>,
}

impl SparseMatrix {
    /// Builds from per-row (column, value) lists; columns are sorted and
    /// duplicate entries summed.
    pub fn from_rows(rows: Vec<Vec<(usize, C)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                assert!(c < n, "column {c} out of range for an {n}x{n} matrix");
                if cols.len() > *row_ptr.last().expect("row_ptr starts nonempty") && cols.last() == Some(&c) {
                    *vals.last_mut().expect("paired with cols") += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.row(i).find(|e| e.0 == j).map_or(C::new(0.0, 0.0), |e| e.1)
    }

    pub fn matvec(&self, x: &[C]) -> Vec<C> {
        assert_eq!(x.len(), self.n, "vector length must match the matrix");
        (0..self.n).into_par_iter().map(|i| self.row(i).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut rows = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                rows[c].push((i, v.conj()));
            }
        }
        Self::from_rows(rows)
    }

    /// max |a_ij| over all stored entries.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// ‖self − other‖_max; the two must share a sparsity pattern up to zeros.
    pub fn max_abs_diff(&self, other: &SparseMatrix) -> f64 {
        (0..self.n)
            .flat_map(|i| {
                let cols: Vec<usize> = self.row(i).chain(other.row(i)).map(|e| e.0).collect();
                cols.into_iter().map(move |c| (self.get(i, c) - other.get(i, c)).norm())
            })
            .fold(0.0, f64::max)
    }
}
