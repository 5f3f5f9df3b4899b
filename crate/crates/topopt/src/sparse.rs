//! Compressed-row sparse matrices and the Gauss-Seidel smoother.
//!
//! `CsrMatrix` is the universal operator container of the crate: stiffness
//! matrices, augmented interior-point systems, prolongations and density
//! filters all live in this format. Column indices are strictly increasing
//! within each row and duplicates are merged at construction, so every kernel
//! has a fixed, deterministic accumulation order.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets. Duplicate positions are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut entries: Vec<(usize, usize, f64)> = triplets.to_vec();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_offsets = vec![0usize; nrows + 1];
        let mut col_indices: Vec<usize> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut prev: Option<(usize, usize)> = None;
        for &(r, c, v) in &entries {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) out of bounds");
            if prev == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                prev = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_offsets[r + 1] += row_offsets[r];
        }
        CsrMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Assemble directly from canonical CSR arrays. Debug-checked.
    pub fn from_raw(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_offsets.len(), nrows + 1);
        debug_assert_eq!(*row_offsets.last().unwrap(), col_indices.len());
        debug_assert_eq!(col_indices.len(), values.len());
        debug_assert!(row_offsets.windows(2).all(|w| w[0] <= w[1]));
        for r in 0..nrows {
            let cols = &col_indices[row_offsets[r]..row_offsets[r + 1]];
            debug_assert!(cols.windows(2).all(|w| w[0] < w[1]), "row {r} not sorted");
            debug_assert!(cols.iter().all(|&c| c < ncols));
        }
        CsrMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Matrix with no stored entries.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            row_offsets: vec![0; nrows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Column indices and values of one row.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_offsets[i];
        let hi = self.row_offsets[i + 1];
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Stored value at (i, j), or 0.0 when the position is not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// out = A v
    pub fn spmv_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.ncols);
        debug_assert_eq!(out.len(), self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (c, a) in cols.iter().zip(vals) {
                acc += a * v[*c];
            }
            out[i] = acc;
        }
    }

    /// Returns A v, checking dimensions.
    pub fn spmv(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                context: "spmv",
                expected: self.ncols,
                found: v.len(),
            });
        }
        let mut out = vec![0.0; self.nrows];
        self.spmv_into(v, &mut out);
        Ok(out)
    }

    /// out = A^T v without forming the transpose.
    pub fn spmv_transpose_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.nrows);
        debug_assert_eq!(out.len(), self.ncols);
        out.fill(0.0);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let vi = v[i];
            for (c, a) in cols.iter().zip(vals) {
                out[*c] += a * vi;
            }
        }
    }

    pub fn spmv_transpose(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.nrows {
            return Err(Error::DimensionMismatch {
                context: "spmv_transpose",
                expected: self.nrows,
                found: v.len(),
            });
        }
        let mut out = vec![0.0; self.ncols];
        self.spmv_transpose_into(v, &mut out);
        Ok(out)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut row_offsets = vec![0usize; self.ncols + 1];
        for &c in &self.col_indices {
            row_offsets[c + 1] += 1;
        }
        for c in 0..self.ncols {
            row_offsets[c + 1] += row_offsets[c];
        }
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0f64; self.nnz()];
        let mut cursor = row_offsets.clone();
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, a) in cols.iter().zip(vals) {
                let k = cursor[*c];
                col_indices[k] = i;
                values[k] = *a;
                cursor[*c] += 1;
            }
        }
        CsrMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Sparse product A * B with a dense accumulator per row.
    pub fn matmul(&self, rhs: &CsrMatrix) -> Result<CsrMatrix> {
        if self.ncols != rhs.nrows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                expected: self.ncols,
                found: rhs.nrows,
            });
        }
        let n_out = rhs.ncols;
        let mut acc = vec![0.0f64; n_out];
        let mut in_row = vec![false; n_out];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_offsets = Vec::with_capacity(self.nrows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (k, a) in cols.iter().zip(vals) {
                let (bcols, bvals) = rhs.row(*k);
                for (c, b) in bcols.iter().zip(bvals) {
                    if !in_row[*c] {
                        in_row[*c] = true;
                        touched.push(*c);
                    }
                    acc[*c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                col_indices.push(c);
                values.push(acc[c]);
                acc[c] = 0.0;
                in_row[c] = false;
            }
            touched.clear();
            row_offsets.push(col_indices.len());
        }
        Ok(CsrMatrix {
            nrows: self.nrows,
            ncols: n_out,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Entrywise sum of two matrices with identical dimensions.
    pub fn add(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                context: "matrix add",
                expected: self.nrows,
                found: other.nrows,
            });
        }
        let mut row_offsets = Vec::with_capacity(self.nrows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let next_a = ca.get(p).copied().unwrap_or(usize::MAX);
                let next_b = cb.get(q).copied().unwrap_or(usize::MAX);
                if next_a == next_b {
                    col_indices.push(next_a);
                    values.push(va[p] + vb[q]);
                    p += 1;
                    q += 1;
                } else if next_a < next_b {
                    col_indices.push(next_a);
                    values.push(va[p]);
                    p += 1;
                } else {
                    col_indices.push(next_b);
                    values.push(vb[q]);
                    q += 1;
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Scale row i by s[i].
    pub fn scale_rows(&self, s: &[f64]) -> CsrMatrix {
        assert_eq!(s.len(), self.nrows);
        let mut out = self.clone();
        for i in 0..self.nrows {
            for k in out.row_offsets[i]..out.row_offsets[i + 1] {
                out.values[k] *= s[i];
            }
        }
        out
    }

    /// Scale column j by s[j].
    pub fn scale_columns(&self, s: &[f64]) -> CsrMatrix {
        assert_eq!(s.len(), self.ncols);
        let mut out = self.clone();
        for (k, &c) in out.col_indices.iter().enumerate() {
            out.values[k] *= s[c];
        }
        out
    }

    /// Largest normalized asymmetry max |A_ij - A_ji| / max(1, |A_ij|) over
    /// stored entries. Zero for an exactly symmetric matrix.
    pub fn symmetry_error(&self) -> f64 {
        assert_eq!(
            self.nrows, self.ncols,
            "symmetry check needs a square matrix"
        );
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, a) in cols.iter().zip(vals) {
                let b = self.get(*c, i);
                let err = (a - b).abs() / a.abs().max(1.0);
                worst = worst.max(err);
            }
        }
        worst
    }

    pub fn is_symmetric_within(&self, tol: f64) -> bool {
        self.symmetry_error() <= tol
    }

    /// Dump in Matrix Market coordinate format (general, 1-based indices).
    pub fn write_matrix_market<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:e}", i + 1, c + 1, v)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDirection {
    Forward,
    Backward,
}

/// One in-place Gauss-Seidel sweep on A z = b in the given ordering.
///
/// Rows are relaxed sequentially; for SPD matrices the A-norm of the error
/// never increases. Fails on a zero diagonal entry.
pub fn gauss_seidel_sweep(
    a: &CsrMatrix,
    b: &[f64],
    z: &mut [f64],
    direction: SweepDirection,
) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "gauss_seidel_sweep",
            expected: n,
            found: a.ncols(),
        });
    }
    debug_assert_eq!(b.len(), n);
    debug_assert_eq!(z.len(), n);
    let mut relax = |i: usize| -> Result<()> {
        let (cols, vals) = a.row(i);
        let mut diag = 0.0;
        let mut acc = b[i];
        for (c, v) in cols.iter().zip(vals) {
            if *c == i {
                diag = *v;
            } else {
                acc -= v * z[*c];
            }
        }
        if diag == 0.0 {
            return Err(Error::ZeroDiagonal { row: i });
        }
        z[i] = acc / diag;
        Ok(())
    };
    match direction {
        SweepDirection::Forward => {
            for i in 0..n {
                relax(i)?;
            }
        }
        SweepDirection::Backward => {
            for i in (0..n).rev() {
                relax(i)?;
            }
        }
    }
    Ok(())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{dense_from_csr, dense_matvec, dense_solve, Lcg};

    #[test]
    fn spmv_identity_and_zero() {
        let id = CsrMatrix::identity(3);
        assert_eq!(id.spmv(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);

        let z = CsrMatrix::zeros(2, 2);
        assert_eq!(z.spmv(&[5.0, -7.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let id = CsrMatrix::identity(3);
        assert!(matches!(
            id.spmv(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spmv_matches_dense_product_on_random_spd() {
        let mut rng = Lcg::new(0x5eed);
        let a = crate::testkit::random_spd(5, &mut rng);
        let v: Vec<f64> = (0..5).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
        let dense = dense_from_csr(&a);
        let want = dense_matvec(&dense, &v);
        let got = a.spmv(&v).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-13, "got {g}, want {w}");
        }
    }

    #[test]
    fn spmv_linearity() {
        let mut rng = Lcg::new(42);
        let a = crate::testkit::random_spd(8, &mut rng);
        let v: Vec<f64> = (0..8).map(|_| rng.next_f64() - 0.5).collect();
        let w: Vec<f64> = (0..8).map(|_| rng.next_f64() - 0.5).collect();
        let (alpha, beta) = (1.7, -0.3);
        let combo: Vec<f64> = v
            .iter()
            .zip(&w)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        let lhs = a.spmv(&combo).unwrap();
        let av = a.spmv(&v).unwrap();
        let aw = a.spmv(&w).unwrap();
        for i in 0..8 {
            let rhs = alpha * av[i] + beta * aw[i];
            let scale = rhs.abs().max(1.0);
            assert!((lhs[i] - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn triplets_merge_duplicates_and_sort() {
        let a = CsrMatrix::from_triplets(2, 2, &[(1, 1, 2.0), (0, 1, 1.0), (1, 1, 3.0)]);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(1, 1), 5.0);
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(0, 0), 0.0);
    }

    #[test]
    fn transpose_round_trip() {
        let a = CsrMatrix::from_triplets(2, 3, &[(0, 2, 1.0), (1, 0, -2.0), (1, 2, 4.0)]);
        let t = a.transpose();
        assert_eq!(t.nrows(), 3);
        assert_eq!(t.get(2, 0), 1.0);
        assert_eq!(t.get(0, 1), -2.0);
        assert_eq!(t.transpose(), a);
    }

    #[test]
    fn matmul_against_dense() {
        let mut rng = Lcg::new(7);
        let a = crate::testkit::random_spd(6, &mut rng);
        let b = crate::testkit::random_spd(6, &mut rng);
        let c = a.matmul(&b).unwrap();
        let da = dense_from_csr(&a);
        let db = dense_from_csr(&b);
        for i in 0..6 {
            for j in 0..6 {
                let want: f64 = (0..6).map(|k| da[i][k] * db[k][j]).sum();
                assert!((c.get(i, j) - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn add_merges_patterns() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 2.0)]);
        let b = CsrMatrix::from_triplets(2, 2, &[(0, 1, 3.0), (1, 1, -2.0)]);
        let c = a.add(&b).unwrap();
        assert_eq!(c.get(0, 0), 1.0);
        assert_eq!(c.get(0, 1), 3.0);
        assert_eq!(c.get(1, 1), 0.0);
    }

    #[test]
    fn gauss_seidel_exact_on_diagonal_matrix() {
        let a = CsrMatrix::from_triplets(3, 3, &[(0, 0, 2.0), (1, 1, 4.0), (2, 2, 8.0)]);
        let b = [2.0, 8.0, 32.0];
        let mut z = vec![9.0, -3.0, 0.5];
        gauss_seidel_sweep(&a, &b, &mut z, SweepDirection::Forward).unwrap();
        assert_eq!(z, vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn gauss_seidel_fixed_point() {
        let mut rng = Lcg::new(11);
        let a = crate::testkit::random_spd(6, &mut rng);
        let z0: Vec<f64> = (0..6).map(|_| rng.next_f64()).collect();
        let b = a.spmv(&z0).unwrap();
        let mut z = z0.clone();
        gauss_seidel_sweep(&a, &b, &mut z, SweepDirection::Forward).unwrap();
        for (zi, z0i) in z.iter().zip(&z0) {
            assert!((zi - z0i).abs() <= 1e-12);
        }
    }

    #[test]
    fn gauss_seidel_error_decreases_on_spd_system() {
        let a =
            CsrMatrix::from_triplets(2, 2, &[(0, 0, 3.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]);
        let b = [1.0, -1.0];
        let exact = dense_solve(&dense_from_csr(&a), &b);
        let mut z = vec![10.0, -10.0];
        let err_norm = |z: &[f64]| -> f64 {
            let e: Vec<f64> = z.iter().zip(&exact).map(|(a, b)| a - b).collect();
            norm2(&e)
        };
        let e0 = err_norm(&z);
        gauss_seidel_sweep(&a, &b, &mut z, SweepDirection::Forward).unwrap();
        let e1 = err_norm(&z);
        gauss_seidel_sweep(&a, &b, &mut z, SweepDirection::Backward).unwrap();
        let e2 = err_norm(&z);
        assert!(e1 < e0 && e2 < e1, "errors: {e0} {e1} {e2}");
    }

    #[test]
    fn gauss_seidel_rejects_zero_diagonal() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0)]);
        let mut z = vec![0.0, 0.0];
        let err = gauss_seidel_sweep(&a, &[1.0, 1.0], &mut z, SweepDirection::Forward).unwrap_err();
        assert_eq!(err, Error::ZeroDiagonal { row: 1 });
    }

    #[test]
    fn forward_backward_sweep_pair_is_symmetric() {
        // The symmetric Gauss-Seidel preconditioner M^{-1} r obtained from a
        // forward sweep followed by a backward sweep (z0 = 0) must satisfy
        // <M^{-1} u, v> = <u, M^{-1} v>; this is what makes it admissible
        // inside conjugate gradients.
        let mut rng = Lcg::new(23);
        let a = crate::testkit::random_spd(12, &mut rng);
        let apply = |r: &[f64]| -> Vec<f64> {
            let mut z = vec![0.0; r.len()];
            gauss_seidel_sweep(&a, r, &mut z, SweepDirection::Forward).unwrap();
            gauss_seidel_sweep(&a, r, &mut z, SweepDirection::Backward).unwrap();
            z
        };
        for _ in 0..5 {
            let u: Vec<f64> = (0..12).map(|_| rng.next_f64() - 0.5).collect();
            let v: Vec<f64> = (0..12).map(|_| rng.next_f64() - 0.5).collect();
            let lhs = dot(&apply(&u), &v);
            let rhs = dot(&u, &apply(&v));
            assert!(
                (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0),
                "asymmetric preconditioner: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn symmetry_error_detects_asymmetry() {
        let sym = CsrMatrix::from_triplets(2, 2, &[(0, 1, 2.0), (1, 0, 2.0), (0, 0, 1.0)]);
        assert!(sym.is_symmetric_within(1e-12));
        let asym = CsrMatrix::from_triplets(2, 2, &[(0, 1, 2.0), (1, 0, 2.5)]);
        assert!(!asym.is_symmetric_within(1e-12));
    }

    #[test]
    fn matrix_market_dump() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.5), (1, 0, -2.0)]);
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general"));
        assert!(text.contains("2 2 2"));
        assert!(text.contains("2 1 -2e0"));
    }
}
