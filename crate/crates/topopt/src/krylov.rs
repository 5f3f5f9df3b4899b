//! Conjugate gradients preconditioned by one multigrid V-cycle.
//!
//! The iteration follows the classic preconditioned recurrence with the
//! residual kept as r = A z - b. Low-accuracy stopping is the point: the
//! optimizers ask for a few digits only and the V-cycle preconditioner keeps
//! the iteration count flat across mesh levels.

use crate::error::{Error, Result};
use crate::multigrid::MultigridHierarchy;
use crate::sparse::{axpy, dot, norm2, CsrMatrix};

/// Anything that can act as the system operator.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply_into(&self, v: &[f64], out: &mut [f64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        self.spmv_into(v, out);
    }
}

/// Preconditioner application M^{-1} r; must be symmetric positive definite.
pub trait Preconditioner {
    fn apply(&self, r: &[f64]) -> Result<Vec<f64>>;
}

pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        Ok(r.to_vec())
    }
}

impl Preconditioner for MultigridHierarchy {
    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        self.apply_preconditioner(r)
    }
}

/// How the residual test is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopMode {
    /// ||rho|| <= tol * max(||b||, floor); the default reading
    Relative,
    /// ||rho|| * ||b|| <= tol; kept for fidelity experiments
    ProductLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    pub tol: f64,
    pub mode: StopMode,
}

impl StoppingRule {
    pub fn relative(tol: f64) -> StoppingRule {
        StoppingRule {
            tol,
            mode: StopMode::Relative,
        }
    }

    /// True when the residual satisfies the configured test. A tiny floor on
    /// ||b|| keeps the relative form meaningful for b = 0.
    pub fn is_satisfied(&self, residual_norm: f64, rhs_norm: f64) -> bool {
        debug_assert!(self.tol > 0.0);
        match self.mode {
            StopMode::Relative => residual_norm <= self.tol * rhs_norm.max(1e-300),
            StopMode::ProductLiteral => residual_norm * rhs_norm <= self.tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PcgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub converged: bool,
}

/// Preconditioned conjugate gradients for SPD operators.
///
/// Runs until the stopping rule fires or `max_iters` passes are spent; a
/// non-positive curvature p^T A p aborts with an error, since the systems
/// solved here are positive definite by construction and negative curvature
/// signals an assembly bug.
pub fn pcg(
    a: &dyn LinearOperator,
    b: &[f64],
    precond: &dyn Preconditioner,
    stop: &StoppingRule,
    max_iters: usize,
    z0: &[f64],
) -> Result<PcgOutcome> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "pcg rhs",
            expected: n,
            found: b.len(),
        });
    }
    if z0.len() != n {
        return Err(Error::DimensionMismatch {
            context: "pcg initial guess",
            expected: n,
            found: z0.len(),
        });
    }
    let b_norm = norm2(b);
    let mut z = z0.to_vec();

    // r = A z - b
    let mut r = vec![0.0; n];
    a.apply_into(&z, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    let mut r_norm = norm2(&r);
    if stop.is_satisfied(r_norm, b_norm) {
        return Ok(PcgOutcome {
            solution: z,
            iterations: 0,
            final_residual_norm: r_norm,
            converged: true,
        });
    }

    let mut y = precond.apply(&r)?;
    let mut p: Vec<f64> = y.iter().map(|v| -v).collect();
    let mut ry = dot(&r, &y);
    let mut ap = vec![0.0; n];

    for iteration in 1..=max_iters {
        a.apply_into(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if curvature <= 0.0 {
            return Err(Error::IndefiniteDirection { iteration });
        }
        let alpha = ry / curvature;
        axpy(alpha, &p, &mut z);
        axpy(alpha, &ap, &mut r);
        r_norm = norm2(&r);
        if stop.is_satisfied(r_norm, b_norm) {
            return Ok(PcgOutcome {
                solution: z,
                iterations: iteration,
                final_residual_norm: r_norm,
                converged: true,
            });
        }
        y = precond.apply(&r)?;
        let ry_new = dot(&r, &y);
        let beta = ry_new / ry;
        for (pi, yi) in p.iter_mut().zip(&y) {
            *pi = -yi + beta * *pi;
        }
        ry = ry_new;
    }

    Ok(PcgOutcome {
        solution: z,
        iterations: max_iters,
        final_residual_norm: r_norm,
        converged: false,
    })
}
