//! Oracles shared by the integration suites. Deliberately written against
//! plain dense linear algebra so they stay independent of the sparse solver
//! paths they validate.

#![allow(dead_code)]

use topopt::sparse::CsrMatrix;

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

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
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

/// LU solve with partial pivoting.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()))
            .unwrap();
        assert!(m[pivot][col].abs() > 1e-300, "singular oracle matrix");
        m.swap(col, pivot);
        x.swap(col, pivot);
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

/// Smallest eigenvalue of a symmetric dense matrix via cyclic Jacobi sweeps.
pub fn smallest_eigenvalue(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _ in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(m[i][j].abs());
            }
        }
        if off < 1e-13 {
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
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).fold(f64::INFINITY, f64::min)
}

/// Plane-stress bilinear-quad element stiffness integrated with a 2x2 Gauss
/// rule; the acceptance reference for the assembly's closed form.
pub fn quadrature_element_stiffness(young: f64, poisson: f64) -> [[f64; 8]; 8] {
    let d11 = young / (1.0 - poisson * poisson);
    let d12 = poisson * d11;
    let d33 = 0.5 * (1.0 - poisson) * d11;
    let sx = [-1.0, 1.0, 1.0, -1.0];
    let sy = [-1.0, -1.0, 1.0, 1.0];
    let gp = 1.0 / 3.0f64.sqrt();
    let points = [(-gp, -gp), (gp, -gp), (gp, gp), (-gp, gp)];
    let mut ke = [[0.0f64; 8]; 8];
    for &(xi, eta) in &points {
        let mut dndx = [0.0f64; 4];
        let mut dndy = [0.0f64; 4];
        for a in 0..4 {
            dndx[a] = 0.5 * sx[a] * (1.0 + sy[a] * eta);
            dndy[a] = 0.5 * sy[a] * (1.0 + sx[a] * xi);
        }
        let w = 0.25;
        for a in 0..4 {
            for b in 0..4 {
                ke[2 * a][2 * b] += w * (d11 * dndx[a] * dndx[b] + d33 * dndy[a] * dndy[b]);
                ke[2 * a + 1][2 * b + 1] += w * (d11 * dndy[a] * dndy[b] + d33 * dndx[a] * dndx[b]);
                ke[2 * a][2 * b + 1] += w * (d12 * dndx[a] * dndy[b] + d33 * dndy[a] * dndx[b]);
                ke[2 * a + 1][2 * b] += w * (d12 * dndy[a] * dndx[b] + d33 * dndx[a] * dndy[b]);
            }
        }
    }
    ke
}

/// Minimize compliance over the box-and-volume feasible set by projected
/// gradient with exact equilibrium solves; the independent optimum oracle
/// for tiny instances of the convex problem.
pub struct ProjectedGradientOracle {
    pub mesh: topopt::fem::Mesh,
    pub ke: [[f64; 8]; 8],
    pub f: Vec<f64>,
    pub volume: f64,
    pub x_upper: f64,
}

impl ProjectedGradientOracle {
    pub fn from_problem(problem: &topopt::fem::ProblemSpec) -> Self {
        let mesh = problem.finest_mesh();
        let ke = problem.element_stiffness();
        let f = topopt::fem::assemble_load(&mesh, problem.load).unwrap();
        ProjectedGradientOracle {
            mesh,
            ke,
            f,
            volume: problem.volume,
            x_upper: problem.x_upper,
        }
    }

    fn compliance_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let k = topopt::fem::assemble_stiffness(&self.mesh, self.ke, x);
        let u = dense_solve(&dense_from_csr(&k), &self.f);
        let c = topopt::fem::compliance(&self.f, &u);
        let g = topopt::fem::element_energies(&self.mesh, &self.ke, &u);
        // d(1/2 f^T u)/dx_i = -1/2 u^T K_i u by the adjoint identity
        let grad = g.iter().map(|gi| -0.5 * gi).collect();
        (c, grad)
    }

    /// Euclidean projection onto { sum x = V, floor <= x <= x_upper } by
    /// bisection on the shift of the clamped field.
    fn project(&self, y: &[f64], floor: f64) -> Vec<f64> {
        let clamp_at = |mu: f64| -> Vec<f64> {
            y.iter()
                .map(|v| (v - mu).clamp(floor, self.x_upper))
                .collect()
        };
        let (mut lo, mut hi) = (-1e6, 1e6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let total: f64 = clamp_at(mid).iter().sum();
            if total > self.volume {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        clamp_at(0.5 * (lo + hi))
    }

    /// Projected gradient with backtracking; returns the minimizer of the
    /// convex problem to roughly 1e-8 stationarity.
    pub fn solve(&self) -> Vec<f64> {
        let m = self.mesh.num_elements();
        let mut x = vec![self.volume / m as f64; m];
        let floor = 1e-12;
        let mut step = 1.0;
        let (mut value, mut grad) = self.compliance_and_gradient(&x);
        for _ in 0..200_000 {
            let trial_point = |t: f64| -> Vec<f64> {
                let y: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - t * gi).collect();
                self.project(&y, floor)
            };
            let mut t = step;
            let mut next = trial_point(t);
            let mut moved: f64 = next
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if moved <= 1e-10 {
                break;
            }
            let (mut next_value, mut next_grad) = self.compliance_and_gradient(&next);
            let mut backtracks = 0;
            while next_value > value + 1e-14 && backtracks < 60 {
                t *= 0.5;
                next = trial_point(t);
                let pair = self.compliance_and_gradient(&next);
                next_value = pair.0;
                next_grad = pair.1;
                backtracks += 1;
            }
            if backtracks == 0 {
                step = (step * 2.0).min(1e6);
            } else {
                step = t;
            }
            moved = next
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            x = next;
            value = next_value;
            grad = next_grad;
            if moved <= 1e-12 {
                break;
            }
        }
        x
    }
}
