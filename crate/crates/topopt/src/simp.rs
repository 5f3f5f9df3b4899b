//! Penalized material model with density filtering.
//!
//! The filtered density is a weighted combination of nearby element values,
//! x_filtered = W x, with hat weights max(0, r_min - dist) over element
//! centers and columns normalized so that the total material volume is
//! preserved exactly (every column of W sums to one). Stiffness then uses
//! the filtered density to the power `penal`, and the sensitivity matrix
//! picks up the filter by the chain rule.

use crate::error::Result;
use crate::fem::{assemble_b, element_energies, DistanceMetric, Mesh};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone)]
pub struct FilterMatrix {
    weights: CsrMatrix,
    r_min: f64,
    metric: DistanceMetric,
}

impl FilterMatrix {
    pub fn weights(&self) -> &CsrMatrix {
        &self.weights
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn metric(&self) -> DistanceMetric {
        self.metric
    }

    /// Filtered density W x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.weights.spmv_into(x, &mut out);
        out
    }

    /// W^T v; the adjoint that carries sensitivities back to the raw field.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.weights.spmv_transpose_into(v, &mut out);
        out
    }
}

/// Build the filter for a mesh. Distances are measured between element
/// centers in element units, so `r_min = 2` with the Manhattan metric
/// couples each element to its four edge neighbours.
pub fn build_filter(mesh: &Mesh, r_min: f64, metric: DistanceMetric) -> FilterMatrix {
    assert!(r_min > 0.0);
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let m = nx * ny;
    let reach = r_min.ceil() as isize;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut col_sums = vec![0.0f64; m];
    for ex in 0..nx as isize {
        for ey in 0..ny as isize {
            let i = (ex as usize) * ny + ey as usize;
            for dx in -reach..=reach {
                for dy in -reach..=reach {
                    let (jx, jy) = (ex + dx, ey + dy);
                    if jx < 0 || jy < 0 || jx >= nx as isize || jy >= ny as isize {
                        continue;
                    }
                    let dist = match metric {
                        DistanceMetric::Manhattan => (dx.abs() + dy.abs()) as f64,
                        DistanceMetric::Euclidean => ((dx * dx + dy * dy) as f64).sqrt(),
                    };
                    let hat = r_min - dist;
                    if hat > 0.0 {
                        let j = (jx as usize) * ny + jy as usize;
                        // entry of the unnormalized filter at (row i, col j)
                        triplets.push((i, j, hat));
                        col_sums[j] += hat;
                    }
                }
            }
        }
    }
    // normalize columns; the hat weights are symmetric, so each column sum
    // equals the matching row sum and volume is preserved
    for (_, j, v) in triplets.iter_mut() {
        *v /= col_sums[*j];
    }
    FilterMatrix {
        weights: CsrMatrix::from_triplets(m, m, &triplets),
        r_min,
        metric,
    }
}

/// Penalized stiffness weights (W x)^penal.
pub fn penalized_weights(filter: &FilterMatrix, x: &[f64], penal: f64) -> Vec<f64> {
    let filtered = filter.apply(x);
    if penal == 1.0 {
        filtered
    } else {
        filtered.iter().map(|v| v.powf(penal)).collect()
    }
}

/// Stiffness sum_j (W x)_j^penal K_j assembled on the free dofs.
pub fn simp_stiffness(
    mesh: &Mesh,
    ke: [[f64; 8]; 8],
    x: &[f64],
    filter: &FilterMatrix,
    penal: f64,
) -> CsrMatrix {
    let weights = penalized_weights(filter, x, penal);
    crate::fem::assemble_stiffness(mesh, ke, &weights)
}

/// Derivative scale penal * (W x)^(penal - 1) per element.
fn chain_scale(filter: &FilterMatrix, x: &[f64], penal: f64) -> Vec<f64> {
    let filtered = filter.apply(x);
    if penal == 1.0 {
        vec![1.0; x.len()]
    } else {
        filtered
            .iter()
            .map(|v| penal * v.powf(penal - 1.0))
            .collect()
    }
}

/// Sensitivity matrix of the penalized stiffness: column i is the derivative
/// of K(x) u with respect to x_i, i.e. sum_j W_ji penal (W x)_j^(penal-1) K_j u.
pub fn simp_b(
    mesh: &Mesh,
    ke: &[[f64; 8]; 8],
    u: &[f64],
    x: &[f64],
    filter: &FilterMatrix,
    penal: f64,
) -> Result<CsrMatrix> {
    let raw_b = assemble_b(mesh, ke, u);
    let scale = chain_scale(filter, x, penal);
    // columns mix through diag(scale) * W applied on the right
    raw_b.matmul(&filter.weights().scale_rows(&scale))
}

/// Per-element derivative of the strain energy u^T K(x) u with respect to
/// the raw densities (u frozen): penal * W^T ((W x)^(penal-1) .* g).
pub fn simp_gradient_energies(
    mesh: &Mesh,
    ke: &[[f64; 8]; 8],
    u: &[f64],
    x: &[f64],
    filter: &FilterMatrix,
    penal: f64,
) -> Vec<f64> {
    let g = element_energies(mesh, ke, u);
    let scale = chain_scale(filter, x, penal);
    let scaled: Vec<f64> = g.iter().zip(&scale).map(|(gi, si)| gi * si).collect();
    filter.apply_transpose(&scaled)
}

/// Stationarity residual of the penalized model, sign-matched with the
/// variable-thickness convention: 1/2 d(u^T K u)/dx_i + lambda + phi_i - psi_i.
#[allow(clippy::too_many_arguments)]
pub fn simp_kkt_stationarity(
    mesh: &Mesh,
    ke: &[[f64; 8]; 8],
    u: &[f64],
    x: &[f64],
    lambda: f64,
    phi: &[f64],
    psi: &[f64],
    filter: &FilterMatrix,
    penal: f64,
) -> Vec<f64> {
    let grad = simp_gradient_energies(mesh, ke, u, x, filter, penal);
    grad.iter()
        .zip(phi.iter().zip(psi))
        .map(|(gi, (ph, ps))| 0.5 * gi + lambda + ph - ps)
        .collect()
}
