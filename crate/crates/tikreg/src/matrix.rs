//! Design matrix `A` in dense column-major or compressed-sparse-column form,
//! with the column-subset views (`A_I`) that the Newton solvers reduce onto.

use crate::error::{Error, Result};
use crate::float::Float;
use crate::linalg::{axpy, DenseMatrix};

/// Backing storage for a design matrix.
#[derive(Clone, Debug)]
pub enum Storage<F> {
    /// Column-major entries, `data[i + j * m]` is row `i`, column `j`.
    Dense { data: Vec<F> },
    /// Compressed sparse column: `colptr` has `n + 1` entries, column `j`
    /// occupies `rowidx[colptr[j]..colptr[j+1]]` with strictly ascending rows.
    Sparse { colptr: Vec<usize>, rowidx: Vec<usize>, values: Vec<F> },
}

/// An `m x n` design matrix.
#[derive(Clone, Debug)]
pub struct DesignMatrix<F> {
    m: usize,
    n: usize,
    storage: Storage<F>,
}

impl<F: Float> DesignMatrix<F> {
    /// Dense matrix from column-major data (`data.len() == m * n`).
    pub fn dense(m: usize, n: usize, data: Vec<F>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Config(format!("matrix dimensions must be positive, got {m} x {n}")));
        }
        if data.len() != m * n {
            return Err(Error::Config(format!(
                "dense storage length {} does not match {m} x {n}",
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { context: "design matrix entries" });
        }
        Ok(DesignMatrix { m, n, storage: Storage::Dense { data } })
    }

    /// Dense matrix from row slices (convenient in tests).
    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Config("matrix must have at least one row".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Config("all rows must have equal length".into()));
        }
        let mut data = vec![F::zero(); m * n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                data[i + j * m] = v;
            }
        }
        Self::dense(m, n, data)
    }

    /// Sparse matrix from raw CSC parts.
    pub fn sparse(m: usize, n: usize, colptr: Vec<usize>, rowidx: Vec<usize>, values: Vec<F>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Config(format!("matrix dimensions must be positive, got {m} x {n}")));
        }
        if colptr.len() != n + 1 || colptr[0] != 0 || *colptr.last().unwrap() != rowidx.len() {
            return Err(Error::Config("malformed column pointers".into()));
        }
        if rowidx.len() != values.len() {
            return Err(Error::Config("row index and value arrays must have equal length".into()));
        }
        for j in 0..n {
            let (lo, hi) = (colptr[j], colptr[j + 1]);
            if lo > hi {
                return Err(Error::Config("column pointers must be nondecreasing".into()));
            }
            for t in lo..hi {
                if rowidx[t] >= m {
                    return Err(Error::Config(format!("row index {} out of range in column {j}", rowidx[t])));
                }
                if t > lo && rowidx[t] <= rowidx[t - 1] {
                    return Err(Error::Config(format!("row indices must be strictly ascending in column {j}")));
                }
            }
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { context: "design matrix entries" });
        }
        Ok(DesignMatrix { m, n, storage: Storage::Sparse { colptr, rowidx, values } })
    }

    /// Sparse matrix from `(row, col, value)` triplets (duplicates summed).
    pub fn sparse_from_triplets(m: usize, n: usize, triplets: &[(usize, usize, F)]) -> Result<Self> {
        let mut cols: Vec<Vec<(usize, F)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            if i >= m || j >= n {
                return Err(Error::Config(format!("triplet ({i}, {j}) out of range for {m} x {n}")));
            }
            cols[j].push((i, v));
        }
        let mut colptr = Vec::with_capacity(n + 1);
        let mut rowidx = Vec::new();
        let mut values = Vec::new();
        colptr.push(0);
        for col in cols.iter_mut() {
            col.sort_by_key(|&(i, _)| i);
            let mut t = 0;
            while t < col.len() {
                let (i, mut v) = col[t];
                let mut u = t + 1;
                while u < col.len() && col[u].0 == i {
                    v += col[u].1;
                    u += 1;
                }
                rowidx.push(i);
                values.push(v);
                t = u;
            }
            colptr.push(rowidx.len());
        }
        Self::sparse(m, n, colptr, rowidx, values)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse { .. })
    }

    /// Number of explicitly stored entries.
    pub fn stored_entries(&self) -> usize {
        match &self.storage {
            Storage::Dense { data } => data.len(),
            Storage::Sparse { values, .. } => values.len(),
        }
    }

    /// Entry accessor; O(column nnz) for sparse storage.  Test/diagnostic use.
    pub fn get(&self, i: usize, j: usize) -> F {
        match &self.storage {
            Storage::Dense { data } => data[i + j * self.m],
            Storage::Sparse { colptr, rowidx, values } => {
                for t in colptr[j]..colptr[j + 1] {
                    if rowidx[t] == i {
                        return values[t];
                    }
                }
                F::zero()
            }
        }
    }

    /// Visit every stored entry as `(row, col, value)` in column order.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, F)) {
        match &self.storage {
            Storage::Dense { data } => {
                for j in 0..self.n {
                    for i in 0..self.m {
                        f(i, j, data[i + j * self.m]);
                    }
                }
            }
            Storage::Sparse { colptr, rowidx, values } => {
                for j in 0..self.n {
                    for t in colptr[j]..colptr[j + 1] {
                        f(rowidx[t], j, values[t]);
                    }
                }
            }
        }
    }

    /// `out = A x` (`out` has length `m`).
    pub fn matvec(&self, x: &[F], out: &mut [F]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.m);
        out.fill(F::zero());
        match &self.storage {
            Storage::Dense { data } => {
                for j in 0..self.n {
                    let xj = x[j];
                    if xj != F::zero() {
                        axpy(xj, &data[j * self.m..(j + 1) * self.m], out);
                    }
                }
            }
            Storage::Sparse { colptr, rowidx, values } => {
                for j in 0..self.n {
                    let xj = x[j];
                    if xj != F::zero() {
                        for t in colptr[j]..colptr[j + 1] {
                            out[rowidx[t]] += values[t] * xj;
                        }
                    }
                }
            }
        }
    }

    /// `out = A^T y` (`out` has length `n`).
    pub fn tr_matvec(&self, y: &[F], out: &mut [F]) {
        debug_assert_eq!(y.len(), self.m);
        debug_assert_eq!(out.len(), self.n);
        match &self.storage {
            Storage::Dense { data } => {
                for j in 0..self.n {
                    out[j] = crate::linalg::dot(&data[j * self.m..(j + 1) * self.m], y);
                }
            }
            Storage::Sparse { colptr, rowidx, values } => {
                for j in 0..self.n {
                    let mut s = F::zero();
                    for t in colptr[j]..colptr[j + 1] {
                        s += values[t] * y[rowidx[t]];
                    }
                    out[j] = s;
                }
            }
        }
    }

    /// Inner product of columns `j1` and `j2`.
    pub fn column_dot(&self, j1: usize, j2: usize) -> F {
        match &self.storage {
            Storage::Dense { data } => crate::linalg::dot(
                &data[j1 * self.m..(j1 + 1) * self.m],
                &data[j2 * self.m..(j2 + 1) * self.m],
            ),
            Storage::Sparse { colptr, rowidx, values } => {
                // merge of two ascending index runs
                let (mut a, enda) = (colptr[j1], colptr[j1 + 1]);
                let (mut b, endb) = (colptr[j2], colptr[j2 + 1]);
                let mut s = F::zero();
                while a < enda && b < endb {
                    match rowidx[a].cmp(&rowidx[b]) {
                        std::cmp::Ordering::Less => a += 1,
                        std::cmp::Ordering::Greater => b += 1,
                        std::cmp::Ordering::Equal => {
                            s += values[a] * values[b];
                            a += 1;
                            b += 1;
                        }
                    }
                }
                s
            }
        }
    }

    /// View of the columns selected by `indices` (no copying).
    pub fn subset<'a>(&'a self, indices: &'a [usize]) -> ColumnSubset<'a, F> {
        debug_assert!(indices.iter().all(|&j| j < self.n));
        ColumnSubset { mat: self, idx: indices }
    }
}

/// Borrowed view of `A_I`, the columns of `A` selected by an index set `I`.
#[derive(Clone, Copy)]
pub struct ColumnSubset<'a, F> {
    mat: &'a DesignMatrix<F>,
    idx: &'a [usize],
}

impl<'a, F: Float> ColumnSubset<'a, F> {
    /// Number of selected columns.
    pub fn k(&self) -> usize {
        self.idx.len()
    }

    /// Number of rows (same as the parent matrix).
    pub fn rows(&self) -> usize {
        self.mat.m
    }

    pub fn indices(&self) -> &[usize] {
        self.idx
    }

    /// `out = A_I v` where `v` has length `k` and `out` length `m`.
    pub fn matvec(&self, v: &[F], out: &mut [F]) {
        debug_assert_eq!(v.len(), self.idx.len());
        debug_assert_eq!(out.len(), self.mat.m);
        out.fill(F::zero());
        match &self.mat.storage {
            Storage::Dense { data } => {
                for (p, &j) in self.idx.iter().enumerate() {
                    let vj = v[p];
                    if vj != F::zero() {
                        axpy(vj, &data[j * self.mat.m..(j + 1) * self.mat.m], out);
                    }
                }
            }
            Storage::Sparse { colptr, rowidx, values } => {
                for (p, &j) in self.idx.iter().enumerate() {
                    let vj = v[p];
                    if vj != F::zero() {
                        for t in colptr[j]..colptr[j + 1] {
                            out[rowidx[t]] += values[t] * vj;
                        }
                    }
                }
            }
        }
    }

    /// `out = A_I^T y` where `y` has length `m` and `out` length `k`.
    pub fn tr_matvec(&self, y: &[F], out: &mut [F]) {
        debug_assert_eq!(y.len(), self.mat.m);
        debug_assert_eq!(out.len(), self.idx.len());
        match &self.mat.storage {
            Storage::Dense { data } => {
                for (p, &j) in self.idx.iter().enumerate() {
                    out[p] = crate::linalg::dot(&data[j * self.mat.m..(j + 1) * self.mat.m], y);
                }
            }
            Storage::Sparse { colptr, rowidx, values } => {
                for (p, &j) in self.idx.iter().enumerate() {
                    let mut s = F::zero();
                    for t in colptr[j]..colptr[j + 1] {
                        s += values[t] * y[rowidx[t]];
                    }
                    out[p] = s;
                }
            }
        }
    }

    /// Gram matrix `A_I^T A_I` (`k x k`, dense).
    pub fn gram(&self) -> DenseMatrix<F> {
        let k = self.idx.len();
        let mut g = DenseMatrix::zeros(k);
        for p in 0..k {
            for q in p..k {
                let v = self.mat.column_dot(self.idx[p], self.idx[q]);
                g.set(p, q, v);
                g.set(q, p, v);
            }
        }
        g
    }

    /// Add `coef * A_I A_I^T` into the `m x m` matrix `target`.
    pub fn add_outer_into(&self, coef: F, target: &mut DenseMatrix<F>) {
        let m = self.mat.m;
        debug_assert_eq!(target.dim, m);
        match &self.mat.storage {
            Storage::Dense { data } => {
                for &j in self.idx {
                    let col = &data[j * m..(j + 1) * m];
                    for c in 0..m {
                        let s = coef * col[c];
                        if s != F::zero() {
                            for r in 0..m {
                                target.data[r + c * m] += s * col[r];
                            }
                        }
                    }
                }
            }
            Storage::Sparse { colptr, rowidx, values } => {
                for &j in self.idx {
                    let range = colptr[j]..colptr[j + 1];
                    for tc in range.clone() {
                        let s = coef * values[tc];
                        let c = rowidx[tc];
                        for tr in range.clone() {
                            target.data[rowidx[tr] + c * m] += s * values[tr];
                        }
                    }
                }
            }
        }
    }
}
