//! Sparse `LDLᵀ` factorization without pivoting (up-looking, elimination tree
//! driven), used both for SPD systems and for quasi-definite saddle-point
//! systems whose constraint block is eliminated last.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::ordering::{inverse_permutation, nested_dissection};
use crate::sparse::SparseMatrix;

const NONE: usize = usize::MAX;

/// Sign requirement on the pivots of an `LDLᵀ` factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotPolicy {
    /// Every pivot must be positive; a negative one means the matrix is not SPD.
    Positive,
    /// Pivots may take either sign but must stay away from zero.
    Signed,
}

/// `P A Pᵀ = L D Lᵀ` with unit lower triangular `L` stored by columns.
#[derive(Debug, Clone)]
pub struct LdlFactor<T> {
    n: usize,
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    l_values: Vec<T>,
    diag: Vec<T>,
}

impl<T: Scalar> LdlFactor<T> {
    /// Factors `a` with a nested-dissection ordering; the last `n_last` indices
    /// are eliminated last.
    pub fn new(a: &SparseMatrix<T>, n_last: usize, policy: PivotPolicy) -> Result<Self> {
        let perm = nested_dissection(a, n_last);
        Self::with_ordering(a, perm, policy)
    }

    /// Factors `a` under an explicit elimination order (`perm[k]` = original
    /// index of step `k`).
    pub fn with_ordering(
        a: &SparseMatrix<T>,
        perm: Vec<usize>,
        policy: PivotPolicy,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ncols(),
                context: "LDL factorization of non-square matrix",
            });
        }
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: perm.len(),
                context: "ordering length",
            });
        }
        let pinv = inverse_permutation(&perm);
        let scale = a.max_abs();
        let tol = T::epsilon() * T::of(1e3) * scale;

        // permuted column k holds entries (i, value) with i <= k
        let column = |k: usize, buf: &mut Vec<(usize, T)>| {
            buf.clear();
            let (cols, vals) = a.row(perm[k]);
            for (&c, &v) in cols.iter().zip(vals) {
                let i = pinv[c];
                if i <= k {
                    buf.push((i, v));
                }
            }
        };

        // symbolic: elimination tree and column counts
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        let mut buf = Vec::new();
        for k in 0..n {
            flag[k] = k;
            column(k, &mut buf);
            for &(start, _) in &buf {
                let mut i = start;
                while i < k && flag[i] != k {
                    if parent[i] == NONE {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut col_ptr = vec![0usize; n + 1];
        for k in 0..n {
            col_ptr[k + 1] = col_ptr[k] + lnz[k];
        }
        let total = col_ptr[n];

        // numeric
        let mut row_idx = vec![0usize; total];
        let mut l_values = vec![T::zero(); total];
        let mut diag = vec![T::zero(); n];
        let mut y = vec![T::zero(); n];
        let mut pattern = vec![0usize; n];
        lnz.iter_mut().for_each(|c| *c = 0);
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            column(k, &mut buf);
            for &(start, v) in &buf {
                y[start] += v;
                let mut len = 0;
                let mut i = start;
                while i < k && flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            let mut d = y[k];
            y[k] = T::zero();
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = T::zero();
                let end = col_ptr[i] + lnz[i];
                for p in col_ptr[i]..end {
                    y[row_idx[p]] -= l_values[p] * yi;
                }
                let l_ki = yi / diag[i];
                d -= l_ki * yi;
                row_idx[end] = k;
                l_values[end] = l_ki;
                lnz[i] += 1;
            }
            if !(d.abs() > tol) {
                return Err(Error::Singular {
                    pivot: perm[k],
                    value: d.abs().as_f64(),
                });
            }
            if policy == PivotPolicy::Positive && d < T::zero() {
                return Err(Error::NotPositiveDefinite {
                    pivot: perm[k],
                    value: d.as_f64(),
                });
            }
            diag[k] = d;
        }

        Ok(Self {
            n,
            perm,
            col_ptr,
            row_idx,
            l_values,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros stored in the strictly lower factor.
    pub fn factor_nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Counts of positive and negative pivots.
    pub fn inertia(&self) -> (usize, usize) {
        let pos = self.diag.iter().filter(|&&d| d > T::zero()).count();
        (pos, self.n - pos)
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n, "right-hand side dimension");
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..self.n {
            let xj = x[j];
            if xj != T::zero() {
                for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                    x[self.row_idx[p]] -= self.l_values[p] * xj;
                }
            }
        }
        for (xj, &d) in x.iter_mut().zip(&self.diag) {
            *xj /= d;
        }
        for j in (0..self.n).rev() {
            let mut acc = x[j];
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                acc -= self.l_values[p] * x[self.row_idx[p]];
            }
            x[j] = acc;
        }
        let mut out = vec![T::zero(); self.n];
        for (k, &p) in self.perm.iter().enumerate() {
            out[p] = x[k];
        }
        out
    }
}
