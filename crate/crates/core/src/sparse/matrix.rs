use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::IndexSet;

/// Compressed sparse row matrix.
///
/// Immutable once built. Each stored `(row, col)` coordinate is unique;
/// duplicate triplets are summed during assembly and explicit zeros that
/// result from cancellation are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Assembles a matrix from coordinate triplets, summing duplicates.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, T)],
    ) -> Result<Self> {
        for &(r, c, _) in triplets {
            if r >= nrows {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    bound: nrows,
                    context: "triplet row",
                });
            }
            if c >= ncols {
                return Err(Error::IndexOutOfRange {
                    index: c,
                    bound: ncols,
                    context: "triplet column",
                });
            }
        }

        // counting sort by row, then sort each row by column and merge
        let mut counts = vec![0usize; nrows + 1];
        for &(r, _, _) in triplets {
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut staged: Vec<(usize, T)> = vec![(0, T::zero()); triplets.len()];
        for &(r, c, v) in triplets {
            staged[next[r]] = (c, v);
            next[r] += 1;
        }

        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for r in 0..nrows {
            let row = &mut staged[counts[r]..counts[r + 1]];
            // stable sort keeps the summation order equal to input order
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut acc = row[k].1;
                k += 1;
                while k < row.len() && row[k].0 == c {
                    acc += row[k].1;
                    k += 1;
                }
                col_idx.push(c);
                values.push(acc);
            }
            row_ptr.push(col_idx.len());
        }

        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Builds a matrix from sparse rows given as `(columns, values)` with
    /// strictly ascending columns.
    pub fn from_rows(ncols: usize, rows: Vec<(Vec<usize>, Vec<T>)>) -> Result<Self> {
        let nnz = rows.iter().map(|r| r.0.len()).sum();
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        let nrows = rows.len();
        for (cols, vals) in rows {
            if cols.len() != vals.len() {
                return Err(Error::DimensionMismatch {
                    expected: cols.len(),
                    found: vals.len(),
                    context: "sparse row values",
                });
            }
            IndexSet::check(&cols, ncols)?;
            col_idx.extend(cols);
            values.extend(vals);
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    /// Builds a matrix from dense rows, storing only nonzero entries.
    pub fn from_dense(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut trip = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != T::zero() {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &trip).expect("indices in range by construction")
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, r: usize) -> (&[usize], &[T]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => T::zero(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols, "mul_vec dimension");
        (0..self.nrows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter()
                    .zip(vals)
                    .fold(T::zero(), |acc, (&c, &v)| acc + v * x[c])
            })
            .collect()
    }

    /// `Aᵀ x` without forming the transpose.
    pub fn mul_vec_transposed(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.nrows, "mul_vec_transposed dimension");
        let mut out = vec![T::zero(); self.ncols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == T::zero() {
                continue;
            }
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                out[c] += v * xr;
            }
        }
        out
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        assert_eq!(
            self.nrows, self.ncols,
            "quadratic form of non-square matrix"
        );
        (0..self.nrows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                let ax = cols
                    .iter()
                    .zip(vals)
                    .fold(T::zero(), |acc, (&c, &v)| acc + v * x[c]);
                x[r] * ax
            })
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![T::zero(); self.nnz()];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let k = next[c];
                col_idx[k] = r;
                values[k] = v;
                next[c] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr: counts,
            col_idx,
            values,
        }
    }

    /// Sparse product `self * other` (row-wise Gustavson).
    pub fn matmul(&self, other: &SparseMatrix<T>) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
                context: "matmul inner dimension",
            });
        }
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut acc = vec![T::zero(); other.ncols];
        let mut marker = vec![usize::MAX; other.ncols];
        let mut pattern = Vec::new();
        row_ptr.push(0);
        for r in 0..self.nrows {
            pattern.clear();
            let (acols, avals) = self.row(r);
            for (&k, &a) in acols.iter().zip(avals) {
                let (bcols, bvals) = other.row(k);
                for (&c, &b) in bcols.iter().zip(bvals) {
                    if marker[c] != r {
                        marker[c] = r;
                        acc[c] = T::zero();
                        pattern.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            pattern.sort_unstable();
            for &c in &pattern {
                col_idx.push(c);
                values.push(acc[c]);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows: self.nrows,
            ncols: other.ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// `alpha * self + beta * other`.
    pub fn add_scaled(&self, alpha: T, other: &SparseMatrix<T>, beta: T) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.nrows * self.ncols,
                found: other.nrows * other.ncols,
                context: "matrix addition",
            });
        }
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        row_ptr.push(0);
        for r in 0..self.nrows {
            let (ac, av) = self.row(r);
            let (bc, bv) = other.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ac.len() || j < bc.len() {
                if j == bc.len() || (i < ac.len() && ac[i] < bc[j]) {
                    col_idx.push(ac[i]);
                    values.push(alpha * av[i]);
                    i += 1;
                } else if i == ac.len() || bc[j] < ac[i] {
                    col_idx.push(bc[j]);
                    values.push(beta * bv[j]);
                    j += 1;
                } else {
                    col_idx.push(ac[i]);
                    values.push(alpha * av[i] + beta * bv[j]);
                    i += 1;
                    j += 1;
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Submatrix `A(rows, cols)`.
    pub fn extract(&self, rows: &IndexSet, cols: &IndexSet) -> Result<Self> {
        self.check_rows(rows)?;
        if let Some(&last) = cols.as_slice().last() {
            if last >= self.ncols {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    bound: self.ncols,
                    context: "extract columns",
                });
            }
        }
        let col_map = cols.local_map(self.ncols);
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in rows.iter() {
            let (cs, vs) = self.row(r);
            // cols is ascending, so the local column order stays ascending
            for (&c, &v) in cs.iter().zip(vs) {
                let local = col_map[c];
                if local != usize::MAX {
                    col_idx.push(local);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows: rows.len(),
            ncols: cols.len(),
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Submatrix `A(rows, :)` keeping every column.
    pub fn extract_rows(&self, rows: &IndexSet) -> Result<Self> {
        self.check_rows(rows)?;
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in rows.iter() {
            let (cs, vs) = self.row(r);
            col_idx.extend_from_slice(cs);
            values.extend_from_slice(vs);
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows: rows.len(),
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    fn check_rows(&self, rows: &IndexSet) -> Result<()> {
        match rows.as_slice().last() {
            Some(&last) if last >= self.nrows => Err(Error::IndexOutOfRange {
                index: last,
                bound: self.nrows,
                context: "extract rows",
            }),
            _ => Ok(()),
        }
    }

    /// Largest absolute stored value, `‖A‖_max`.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    /// `max |A_ij − A_ji|` over all stored coordinates.
    pub fn symmetry_defect(&self) -> T {
        assert_eq!(self.nrows, self.ncols, "symmetry of non-square matrix");
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(T::zero(), T::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.ncols]; self.nrows];
        for (r, c, v) in self.triplets() {
            out[r][c] = v;
        }
        out
    }

    /// Writes the coordinate text format: a `# nrows ncols nnz` header and
    /// one `row col value` line per stored entry, 0-based.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# {} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(out, "{} {} {:e}", r, c, v.as_f64())?;
        }
        Ok(())
    }

    /// Reads the format produced by [`SparseMatrix::write_coordinate`].
    pub fn read_coordinate<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (nrows, ncols, nnz) = loop {
            let Some((lineno, line)) = lines.next() else {
                return Err(Error::Parse {
                    line: 0,
                    message: "missing `# nrows ncols nnz` header".into(),
                });
            };
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let body = trimmed.strip_prefix('#').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: "expected `# nrows ncols nnz` header".into(),
            })?;
            let f = parse_fields::<usize>(body, 3, lineno + 1)?;
            break (f[0], f[1], f[2]);
        };
        let mut trip = Vec::with_capacity(nnz);
        for (lineno, line) in lines {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut it = trimmed.split_whitespace();
            let mut next = |what: &str| {
                it.next().ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    message: format!("missing {what}"),
                })
            };
            let r = parse_one::<usize>(next("row")?, lineno + 1)?;
            let c = parse_one::<usize>(next("col")?, lineno + 1)?;
            let v = parse_one::<f64>(next("value")?, lineno + 1)?;
            trip.push((r, c, T::of(v)));
        }
        if trip.len() != nnz {
            return Err(Error::Parse {
                line: 0,
                message: format!("header announces {nnz} entries, found {}", trip.len()),
            });
        }
        Self::from_triplets(nrows, ncols, &trip)
    }
}

fn parse_one<F: std::str::FromStr>(s: &str, line: usize) -> Result<F> {
    s.parse::<F>().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{s}`"),
    })
}

fn parse_fields<F: std::str::FromStr>(s: &str, count: usize, line: usize) -> Result<Vec<F>> {
    let v = s
        .split_whitespace()
        .map(|t| parse_one::<F>(t, line))
        .collect::<Result<Vec<F>>>()?;
    if v.len() != count {
        return Err(Error::Parse {
            line,
            message: format!("expected {count} fields, found {}", v.len()),
        });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_triplets_are_summed() {
        let a = SparseMatrix::from_triplets(1, 1, &[(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 3.0);
    }

    #[test]
    fn empty_input_is_zero_matrix() {
        let a = SparseMatrix::<f64>::from_triplets(2, 2, &[]).unwrap();
        assert_eq!(a.to_dense(), vec![vec![0.0; 2]; 2]);
    }

    #[test]
    fn single_entry_is_not_mirrored() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, 5.0)]).unwrap();
        assert_eq!(a.get(0, 1), 5.0);
        assert_eq!(a.get(1, 0), 0.0);
    }

    #[test]
    fn out_of_range_triplet_is_rejected() {
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(SparseMatrix::from_triplets(2, 2, &[(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn extract_examples() {
        let id = SparseMatrix::<f64>::identity(3);
        let s = IndexSet::new(vec![0, 2], 3).unwrap();
        assert_eq!(id.extract(&s, &s).unwrap(), SparseMatrix::identity(2));

        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let full = IndexSet::full(2);
        assert_eq!(a.extract(&full, &full).unwrap(), a);
        let r = IndexSet::new(vec![1], 2).unwrap();
        let c = IndexSet::new(vec![0], 2).unwrap();
        assert_eq!(a.extract(&r, &c).unwrap().to_dense(), vec![vec![3.0]]);

        let bad = IndexSet::new(vec![4], 5).unwrap();
        assert!(a.extract(&bad, &full).is_err());
        assert!(a.extract(&full, &bad).is_err());
    }

    #[test]
    fn transpose_matmul_and_add() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0, 0.0], vec![0.0, 3.0, 4.0]]);
        let at = a.transpose();
        assert_eq!(
            at.to_dense(),
            vec![vec![1.0, 0.0], vec![2.0, 3.0], vec![0.0, 4.0]]
        );
        let aat = a.matmul(&at).unwrap();
        assert_eq!(aat.to_dense(), vec![vec![5.0, 6.0], vec![6.0, 25.0]]);
        let sum = aat
            .add_scaled(1.0, &SparseMatrix::identity(2), -5.0)
            .unwrap();
        assert_eq!(sum.to_dense(), vec![vec![0.0, 6.0], vec![6.0, 20.0]]);
        assert!(a.matmul(&a).is_err());
        assert_eq!(a.mul_vec_transposed(&[1.0, 1.0]), at.mul_vec(&[1.0, 1.0]));
    }

    #[test]
    fn coordinate_format_round_trip() {
        let a = SparseMatrix::from_dense(&[vec![1.5, 0.0], vec![-2.25e-7, 4.0]]);
        let mut buf = Vec::new();
        a.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# 2 2 3\n0 0 "));
        let b = SparseMatrix::<f64>::read_coordinate(buf.as_slice()).unwrap();
        assert_eq!(a, b);
        assert!(SparseMatrix::<f64>::read_coordinate("# 2 2 2\n0 0 1\n".as_bytes()).is_err());
        assert!(SparseMatrix::<f64>::read_coordinate("0 0 1\n".as_bytes()).is_err());
    }
}
