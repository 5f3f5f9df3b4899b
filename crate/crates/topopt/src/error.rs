//! Crate-wide error type.

use std::fmt;

/// Errors produced by meshing, assembly, linear solvers and the optimizers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand dimensions are incompatible.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    /// A Cholesky pivot was not strictly positive.
    NotPositiveDefinite { pivot_index: usize },
    /// Gauss-Seidel hit a zero diagonal entry.
    ZeroDiagonal { row: usize },
    /// Conjugate gradients encountered non-positive curvature.
    IndefiniteDirection { iteration: usize },
    /// An interior-point scaling entry became non-positive.
    LeftInterior { index: usize },
    /// The load stencil touches an eliminated (fixed) dof.
    LoadOnFixedDof { node: usize },
    /// The two meshes are not in a 2x refinement relation.
    MeshRefinementMismatch,
    /// Bisection cannot reach the prescribed volume.
    VolumeUnreachable { attained: f64, target: f64 },
    /// The adaptive solver tolerance underflowed without restoring descent.
    DescentStall { cg_tol: f64 },
    /// The Newton loop exceeded its per-barrier iteration cap.
    NewtonCapExceeded { barrier: f64, cap: usize },
    /// Unrecognized problem preset name.
    UnknownPreset(String),
    /// Invalid run configuration.
    InvalidConfig(String),
    /// I/O failure while writing artifacts.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                context,
                expected,
                found,
            } => write!(
                f,
                "dimension mismatch in {context}: expected {expected}, found {found}"
            ),
            Error::NotPositiveDefinite { pivot_index } => {
                write!(f, "matrix not positive definite (pivot {pivot_index})")
            }
            Error::ZeroDiagonal { row } => {
                write!(f, "smoother requires nonzero diagonal (row {row})")
            }
            Error::IndefiniteDirection { iteration } => write!(
                f,
                "operator not positive definite along search direction (iteration {iteration})"
            ),
            Error::LeftInterior { index } => {
                write!(f, "state left the interior (component {index})")
            }
            Error::LoadOnFixedDof { node } => {
                write!(f, "load applied to fixed dof (node {node})")
            }
            Error::MeshRefinementMismatch => {
                write!(f, "meshes are not in a 2x refinement relation")
            }
            Error::VolumeUnreachable { attained, target } => write!(
                f,
                "volume unreachable: bisection attained {attained}, target {target}"
            ),
            Error::DescentStall { cg_tol } => write!(
                f,
                "iterative solver cannot sustain descent (cg tolerance underflowed to {cg_tol:e})"
            ),
            Error::NewtonCapExceeded { barrier, cap } => write!(
                f,
                "newton iteration cap {cap} exceeded at barrier {barrier:e}"
            ),
            Error::UnknownPreset(name) => write!(f, "unknown preset '{name}'"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
