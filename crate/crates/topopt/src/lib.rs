//! Topology optimization of variable-thickness sheets.
//!
//! Minimum-compliance design on structured quad meshes, solved two ways:
//! a primal-dual interior point method working on an augmented SPD Schur
//! system, and the optimality-criteria family (OC, damped, averaged). All
//! inner linear systems go through conjugate gradients preconditioned by one
//! geometric multigrid V-cycle, with a skyline Cholesky factorization as the
//! exact-solver arm. A penalized SIMP variant with a density filter plugs
//! into the same interior-point machinery.
//!
//! Start with the runnable programs under `examples/`, or drive everything
//! from the `topopt` binary.

pub mod cholesky;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod ipm;
pub mod krylov;
pub mod model;
pub mod multigrid;
pub mod oc;
pub mod simp;
pub mod sparse;

#[cfg(test)]
pub(crate) mod testkit;

pub use error::{Error, Result};
