//! Material model abstraction shared by the optimizers.
//!
//! The variable-thickness sheet has stiffness linear in the density; the
//! penalized model routes the density through the filter and a power law.
//! Both expose the same three quantities the solvers need: stiffness
//! weights, the per-element energy gradient, and the sensitivity matrix
//! whose columns are d(K(x) u)/dx_i.

use crate::error::Result;
use crate::fem::{assemble_b, element_energies, Mesh, ModelKind, ProblemSpec};
use crate::simp::{build_filter, penalized_weights, simp_b, simp_gradient_energies, FilterMatrix};
use crate::sparse::CsrMatrix;

pub enum Model {
    Vts,
    Simp { filter: FilterMatrix, penal: f64 },
}

impl Model {
    pub fn from_spec(problem: &ProblemSpec, mesh: &Mesh) -> Model {
        match problem.model {
            ModelKind::Vts => Model::Vts,
            ModelKind::Simp {
                penal,
                r_min,
                metric,
            } => Model::Simp {
                filter: build_filter(mesh, r_min, metric),
                penal,
            },
        }
    }

    pub fn is_penalized(&self) -> bool {
        matches!(self, Model::Simp { .. })
    }

    /// Per-element multipliers of the element matrices inside K(x).
    pub fn stiffness_weights(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Model::Vts => x.to_vec(),
            Model::Simp { filter, penal } => penalized_weights(filter, x, *penal),
        }
    }

    /// d(u^T K(x) u)/dx_i with u frozen; reduces to the element energies for
    /// the variable-thickness model.
    pub fn gradient_energies(
        &self,
        mesh: &Mesh,
        ke: &[[f64; 8]; 8],
        u: &[f64],
        x: &[f64],
    ) -> Vec<f64> {
        match self {
            Model::Vts => element_energies(mesh, ke, u),
            Model::Simp { filter, penal } => simp_gradient_energies(mesh, ke, u, x, filter, *penal),
        }
    }

    /// Sensitivity matrix with columns d(K(x) u)/dx_i.
    pub fn sensitivity_matrix(
        &self,
        mesh: &Mesh,
        ke: &[[f64; 8]; 8],
        u: &[f64],
        x: &[f64],
    ) -> Result<CsrMatrix> {
        match self {
            Model::Vts => Ok(assemble_b(mesh, ke, u)),
            Model::Simp { filter, penal } => simp_b(mesh, ke, u, x, filter, *penal),
        }
    }
}
