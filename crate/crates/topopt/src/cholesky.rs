//! Skyline (profile) Cholesky factorization.
//!
//! The reference direct solver for the SPD systems in this crate: coarsest
//! multigrid levels, the exact-solver arms of the optimizers, and validation.
//! Column-major node numbering keeps the stiffness matrices banded, and the
//! dense final row of the augmented interior-point system simply becomes one
//! full profile row, so no ordering is applied.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Lower-triangular profile factor L with A = L L^T.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    /// first stored column of each row of L
    first: Vec<usize>,
    /// start of each row's slice in `vals`; row i holds cols first[i]..=i
    offsets: Vec<usize>,
    vals: Vec<f64>,
}

/// Factor a symmetric positive definite matrix held in full CSR form.
///
/// Fails with the offending pivot index when a non-positive pivot appears,
/// which is how assembly bugs and singular stiffness matrices surface.
pub fn cholesky_factor(a: &CsrMatrix) -> Result<CholeskyFactor> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "cholesky_factor",
            expected: n,
            found: a.ncols(),
        });
    }

    // Row profile of the lower triangle. The envelope is preserved by the
    // factorization, so this is all the storage L needs.
    let mut first = vec![0usize; n];
    for i in 0..n {
        let (cols, _) = a.row(i);
        first[i] = cols.first().map_or(i, |&c| c.min(i));
    }
    let mut offsets = vec![0usize; n + 1];
    for i in 0..n {
        offsets[i + 1] = offsets[i] + (i - first[i] + 1);
    }
    let mut vals = vec![0.0f64; offsets[n]];

    // scatter the lower triangle of A into the profile
    for i in 0..n {
        let (cols, a_vals) = a.row(i);
        for (c, v) in cols.iter().zip(a_vals) {
            if *c <= i {
                vals[offsets[i] + (c - first[i])] = *v;
            }
        }
    }

    for i in 0..n {
        let fi = first[i];
        for j in fi..=i {
            let fj = first[j];
            let lo = fi.max(fj);
            let mut sum = vals[offsets[i] + (j - fi)];
            for k in lo..j {
                sum -= vals[offsets[i] + (k - fi)] * vals[offsets[j] + (k - fj)];
            }
            if j < i {
                vals[offsets[i] + (j - fi)] = sum / vals[offsets[j] + (j - fj)];
            } else {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(Error::NotPositiveDefinite { pivot_index: i });
                }
                vals[offsets[i] + (j - fi)] = sum.sqrt();
            }
        }
    }

    Ok(CholeskyFactor {
        n,
        first,
        offsets,
        vals,
    })
}

impl CholeskyFactor {
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Solve A x = b using the stored factor.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "cholesky solve",
                expected: self.n,
                found: b.len(),
            });
        }
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        // L y = b
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.vals[self.offsets[i]..self.offsets[i + 1]];
            let mut acc = x[i];
            for (k, l) in row[..i - fi].iter().enumerate() {
                acc -= l * x[fi + k];
            }
            x[i] = acc / row[i - fi];
        }
        // L^T x = y, column sweeps over the row-stored profile
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let row = &self.vals[self.offsets[i]..self.offsets[i + 1]];
            x[i] /= row[i - fi];
            let xi = x[i];
            for (k, l) in row[..i - fi].iter().enumerate() {
                x[fi + k] -= l * xi;
            }
        }
    }

    /// Entry L[i][j] (zero outside the profile); used by reconstruction tests.
    pub fn lower_entry(&self, i: usize, j: usize) -> f64 {
        if j > i || j < self.first[i] {
            0.0
        } else {
            self.vals[self.offsets[i] + (j - self.first[i])]
        }
    }
}
