//! Shared helpers for unit tests: a seeded generator and small dense
//! reference routines kept independent of the sparse implementation paths
//! they are used to check.

use crate::sparse::CsrMatrix;

/// Tiny deterministic generator (splitmix64) so tests need no external crate.
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Dense SPD test matrix: R^T R + n I, returned in CSR form.
pub fn random_spd(n: usize, rng: &mut Lcg) -> CsrMatrix {
    let r: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.next_f64() * 2.0 - 1.0).collect())
        .collect();
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut v: f64 = (0..n).map(|k| r[k][i] * r[k][j]).sum();
            if i == j {
                v += n as f64;
            }
            triplets.push((i, j, v));
        }
    }
    CsrMatrix::from_triplets(n, n, &triplets)
}

pub fn dense_from_csr(a: &CsrMatrix) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; a.ncols()]; a.nrows()];
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (c, v) in cols.iter().zip(vals) {
            out[i][*c] = *v;
        }
    }
    out
}

pub fn dense_matvec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Dense LU solve with partial pivoting. Panics on a singular matrix; test
/// inputs are constructed nonsingular.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()))
            .unwrap();
        assert!(m[pivot_row][col].abs() > 1e-300, "singular test matrix");
        m.swap(col, pivot_row);
        x.swap(col, pivot_row);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        x[col] /= m[col][col];
        for row in 0..col {
            x[row] -= m[row][col] * x[col];
        }
    }
    x
}

/// Eigenvalues of a symmetric dense matrix via cyclic Jacobi rotations,
/// returned in ascending order.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(m[i][j].abs());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig
}

/// Plane-stress bilinear-quad element stiffness for a unit square element,
/// integrated numerically with a 2x2 Gauss rule. Node order: counterclockwise
/// from the lower-left corner, two dofs (x, y) per node. Serves as the
/// reference for the closed-form matrix used by the assembly code.
pub fn quadrature_element_stiffness(young: f64, poisson: f64) -> [[f64; 8]; 8] {
    let d11 = young / (1.0 - poisson * poisson);
    let d12 = poisson * d11;
    let d33 = 0.5 * (1.0 - poisson) * d11;

    // corner signs in reference coordinates, counterclockwise from (-1,-1)
    let sx = [-1.0, 1.0, 1.0, -1.0];
    let sy = [-1.0, -1.0, 1.0, 1.0];

    let gp = 1.0 / 3.0f64.sqrt();
    let points = [(-gp, -gp), (gp, -gp), (gp, gp), (-gp, gp)];

    let mut ke = [[0.0f64; 8]; 8];
    for &(xi, eta) in &points {
        // physical gradients on a unit square: d/dx = 2 d/dxi, det J = 1/4,
        // so each Gauss point contributes with weight 1 * 1 * 4 * (1/4) = 1
        // after combining the Jacobian factors; fold them in explicitly.
        let mut dndx = [0.0f64; 4];
        let mut dndy = [0.0f64; 4];
        for a in 0..4 {
            dndx[a] = 2.0 * 0.25 * sx[a] * (1.0 + sy[a] * eta);
            dndy[a] = 2.0 * 0.25 * sy[a] * (1.0 + sx[a] * xi);
        }
        let w = 0.25; // quadrature weight 1x1 times det J
        for a in 0..4 {
            for b in 0..4 {
                // u_a - u_b
                ke[2 * a][2 * b] += w * (d11 * dndx[a] * dndx[b] + d33 * dndy[a] * dndy[b]);
                // v_a - v_b
                ke[2 * a + 1][2 * b + 1] += w * (d11 * dndy[a] * dndy[b] + d33 * dndx[a] * dndx[b]);
                // u_a - v_b
                ke[2 * a][2 * b + 1] += w * (d12 * dndx[a] * dndy[b] + d33 * dndy[a] * dndx[b]);
                // v_a - u_b
                ke[2 * a + 1][2 * b] += w * (d12 * dndy[a] * dndx[b] + d33 * dndx[a] * dndy[b]);
            }
        }
    }
    ke
}
