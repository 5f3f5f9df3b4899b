//! Structured-grid finite element layer.
//!
//! Square bilinear-quad elements on a regular nx-by-ny grid, two displacement
//! dofs per node, fixed dofs eliminated from the system. Node numbering is
//! column-major (y fastest), which keeps the assembled stiffness banded.
//! The plane-stress element stiffness of a square element does not depend on
//! the element size, so a single 8x8 matrix serves every refinement level.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Marker for an eliminated dof inside connectivity tables.
pub const FIXED_DOF: usize = usize::MAX;

/// Which nodes carry homogeneous Dirichlet conditions (both components).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedBoundary {
    /// every node on the left edge
    LeftEdge,
    /// the two corner nodes of the bottom edge
    BottomCorners,
    /// no constraints (test meshes; the stiffness is singular)
    Unconstrained,
}

/// Where the three-node vertical load stencil is applied on the finest mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadPoint {
    RightEdgeMiddle,
    BottomEdgeMiddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMetric {
    Manhattan,
    Euclidean,
}

/// Material model selector for a problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// variable thickness sheet: stiffness linear in the density
    Vts,
    /// penalized filtered density
    Simp {
        penal: f64,
        r_min: f64,
        metric: DistanceMetric,
    },
}

#[derive(Debug, Clone)]
pub struct Mesh {
    nx: usize,
    ny: usize,
    free_dofs: usize,
    /// full dof id -> free dof id, FIXED_DOF for eliminated entries
    dof_map: Vec<usize>,
    /// per element, the 8 free-dof ids (or FIXED_DOF) in the order
    /// (lower-left, lower-right, upper-right, upper-left) x (x, y)
    elem_dofs: Vec<[usize; 8]>,
}

impl Mesh {
    pub fn new(nx: usize, ny: usize, bc: FixedBoundary) -> Mesh {
        assert!(nx >= 1 && ny >= 1);
        let num_nodes = (nx + 1) * (ny + 1);
        let mut fixed = vec![false; num_nodes];
        match bc {
            FixedBoundary::LeftEdge => {
                for iy in 0..=ny {
                    fixed[node_index(0, iy, ny)] = true;
                }
            }
            FixedBoundary::BottomCorners => {
                fixed[node_index(0, 0, ny)] = true;
                fixed[node_index(nx, 0, ny)] = true;
            }
            FixedBoundary::Unconstrained => {}
        }
        let mut dof_map = vec![FIXED_DOF; 2 * num_nodes];
        let mut next = 0usize;
        for node in 0..num_nodes {
            if !fixed[node] {
                dof_map[2 * node] = next;
                dof_map[2 * node + 1] = next + 1;
                next += 2;
            }
        }
        let mut elem_dofs = Vec::with_capacity(nx * ny);
        for ex in 0..nx {
            for ey in 0..ny {
                let corners = [
                    node_index(ex, ey, ny),
                    node_index(ex + 1, ey, ny),
                    node_index(ex + 1, ey + 1, ny),
                    node_index(ex, ey + 1, ny),
                ];
                let mut dofs = [FIXED_DOF; 8];
                for (a, node) in corners.iter().enumerate() {
                    dofs[2 * a] = dof_map[2 * node];
                    dofs[2 * a + 1] = dof_map[2 * node + 1];
                }
                elem_dofs.push(dofs);
            }
        }
        Mesh {
            nx,
            ny,
            free_dofs: next,
            dof_map,
            elem_dofs,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn num_elements(&self) -> usize {
        self.nx * self.ny
    }

    pub fn num_free_dofs(&self) -> usize {
        self.free_dofs
    }

    pub fn node_index(&self, ix: usize, iy: usize) -> usize {
        node_index(ix, iy, self.ny)
    }

    pub fn element_index(&self, ex: usize, ey: usize) -> usize {
        ex * self.ny + ey
    }

    /// Free dof id of (node, component), component 0 = x, 1 = y.
    pub fn free_dof(&self, node: usize, component: usize) -> usize {
        self.dof_map[2 * node + component]
    }

    pub fn element_dofs(&self, elem: usize) -> &[usize; 8] {
        &self.elem_dofs[elem]
    }

    pub fn is_node_fixed(&self, node: usize) -> bool {
        self.dof_map[2 * node] == FIXED_DOF
    }
}

fn node_index(ix: usize, iy: usize, ny: usize) -> usize {
    ix * (ny + 1) + iy
}

/// Free-dof count without materializing a mesh; matches `Mesh::new`.
pub fn free_dof_count(nx: usize, ny: usize, bc: FixedBoundary) -> usize {
    let nodes = (nx + 1) * (ny + 1);
    let fixed = match bc {
        FixedBoundary::LeftEdge => ny + 1,
        FixedBoundary::BottomCorners => 2,
        FixedBoundary::Unconstrained => 0,
    };
    2 * (nodes - fixed)
}

/// Plane-stress bilinear-quad stiffness of a unit square element, closed form.
///
/// Dof order matches `Mesh::element_dofs`. Symmetric positive semidefinite of
/// rank 5 (two translations and one rotation in the kernel).
pub fn element_stiffness(young: f64, poisson: f64) -> [[f64; 8]; 8] {
    assert!(young > 0.0 && (0.0..0.5).contains(&poisson));
    let d11 = young / (1.0 - poisson * poisson);
    let d12 = poisson * d11;
    let d33 = 0.5 * (1.0 - poisson) * d11;
    // corner signs counterclockwise from the lower-left corner
    let sx = [-1.0f64, 1.0, 1.0, -1.0];
    let sy = [-1.0f64, -1.0, 1.0, 1.0];
    let mut ke = [[0.0f64; 8]; 8];
    for a in 0..4 {
        for b in 0..4 {
            // exact integrals of shape-gradient products over the element
            let ixx = 0.25 * sx[a] * sx[b] * (1.0 + sy[a] * sy[b] / 3.0);
            let iyy = 0.25 * sy[a] * sy[b] * (1.0 + sx[a] * sx[b] / 3.0);
            let ixy = 0.25 * sx[a] * sy[b];
            let iyx = 0.25 * sy[a] * sx[b];
            ke[2 * a][2 * b] = d11 * ixx + d33 * iyy;
            ke[2 * a + 1][2 * b + 1] = d11 * iyy + d33 * ixx;
            ke[2 * a][2 * b + 1] = d12 * ixy + d33 * iyx;
            ke[2 * a + 1][2 * b] = d12 * iyx + d33 * ixy;
        }
    }
    ke
}

/// Reusable assembly map: sparsity of the weighted stiffness sum plus, for
/// each element, the index of each of its 64 entries in the CSR value array.
#[derive(Debug, Clone)]
pub struct StiffnessPattern {
    ndofs: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    scatter: Vec<[u32; 64]>,
    ke: [[f64; 8]; 8],
}

const SKIP: u32 = u32::MAX;

impl StiffnessPattern {
    pub fn new(mesh: &Mesh, ke: [[f64; 8]; 8]) -> StiffnessPattern {
        let n = mesh.num_free_dofs();
        // collect the union pattern
        let mut cols_per_row: Vec<Vec<usize>> = vec![Vec::new(); n];
        for elem in 0..mesh.num_elements() {
            let dofs = mesh.element_dofs(elem);
            for &r in dofs.iter().filter(|&&d| d != FIXED_DOF) {
                for &c in dofs.iter().filter(|&&d| d != FIXED_DOF) {
                    cols_per_row[r].push(c);
                }
            }
        }
        let mut row_offsets = vec![0usize; n + 1];
        let mut col_indices = Vec::new();
        for (r, cols) in cols_per_row.iter_mut().enumerate() {
            cols.sort_unstable();
            cols.dedup();
            col_indices.extend_from_slice(cols);
            row_offsets[r + 1] = col_indices.len();
        }
        // per-element scatter indices into the value array
        let mut scatter = Vec::with_capacity(mesh.num_elements());
        for elem in 0..mesh.num_elements() {
            let dofs = mesh.element_dofs(elem);
            let mut idx = [SKIP; 64];
            for (a, &r) in dofs.iter().enumerate() {
                if r == FIXED_DOF {
                    continue;
                }
                let row = &col_indices[row_offsets[r]..row_offsets[r + 1]];
                for (b, &c) in dofs.iter().enumerate() {
                    if c == FIXED_DOF {
                        continue;
                    }
                    let k = row.binary_search(&c).expect("pattern covers element");
                    idx[8 * a + b] = (row_offsets[r] + k) as u32;
                }
            }
            scatter.push(idx);
        }
        StiffnessPattern {
            ndofs: n,
            row_offsets,
            col_indices,
            scatter,
            ke,
        }
    }

    pub fn element_stiffness(&self) -> &[[f64; 8]; 8] {
        &self.ke
    }

    /// K(w) = sum_i w_i K_i on the free dofs.
    pub fn assemble(&self, weights: &[f64]) -> CsrMatrix {
        assert_eq!(weights.len(), self.scatter.len());
        let mut values = vec![0.0f64; self.col_indices.len()];
        for (elem, idx) in self.scatter.iter().enumerate() {
            let w = weights[elem];
            if w == 0.0 {
                continue;
            }
            for a in 0..8 {
                for b in 0..8 {
                    let k = idx[8 * a + b];
                    if k != SKIP {
                        values[k as usize] += w * self.ke[a][b];
                    }
                }
            }
        }
        CsrMatrix::from_raw(
            self.ndofs,
            self.ndofs,
            self.row_offsets.clone(),
            self.col_indices.clone(),
            values,
        )
    }
}

/// One-shot weighted stiffness assembly.
pub fn assemble_stiffness(mesh: &Mesh, ke: [[f64; 8]; 8], weights: &[f64]) -> CsrMatrix {
    StiffnessPattern::new(mesh, ke).assemble(weights)
}

/// Discretized point load: (-1/2, -1, -1/2) on the vertical dofs of the
/// selected boundary node and its two boundary neighbours.
pub fn assemble_load(mesh: &Mesh, load: LoadPoint) -> Result<Vec<f64>> {
    let (center, neighbours) = match load {
        LoadPoint::RightEdgeMiddle => {
            if mesh.ny() % 2 != 0 {
                return Err(Error::InvalidConfig(
                    "right-edge load needs an even vertical element count".into(),
                ));
            }
            let mid = mesh.ny() / 2;
            (
                mesh.node_index(mesh.nx(), mid),
                [
                    mesh.node_index(mesh.nx(), mid - 1),
                    mesh.node_index(mesh.nx(), mid + 1),
                ],
            )
        }
        LoadPoint::BottomEdgeMiddle => {
            if mesh.nx() % 2 != 0 {
                return Err(Error::InvalidConfig(
                    "bottom-edge load needs an even horizontal element count".into(),
                ));
            }
            let mid = mesh.nx() / 2;
            (
                mesh.node_index(mid, 0),
                [mesh.node_index(mid - 1, 0), mesh.node_index(mid + 1, 0)],
            )
        }
    };
    let mut f = vec![0.0f64; mesh.num_free_dofs()];
    for (node, value) in [(center, -1.0), (neighbours[0], -0.5), (neighbours[1], -0.5)] {
        let dof = mesh.free_dof(node, 1);
        if dof == FIXED_DOF {
            return Err(Error::LoadOnFixedDof { node });
        }
        f[dof] = value;
    }
    Ok(f)
}

/// Per-element strain energies g_i = u^T K_i u (nonnegative).
pub fn element_energies(mesh: &Mesh, ke: &[[f64; 8]; 8], u: &[f64]) -> Vec<f64> {
    debug_assert_eq!(u.len(), mesh.num_free_dofs());
    let mut g = Vec::with_capacity(mesh.num_elements());
    for elem in 0..mesh.num_elements() {
        let mut local = [0.0f64; 8];
        for (a, &d) in mesh.element_dofs(elem).iter().enumerate() {
            if d != FIXED_DOF {
                local[a] = u[d];
            }
        }
        let mut acc = 0.0;
        for a in 0..8 {
            let mut row = 0.0;
            for b in 0..8 {
                row += ke[a][b] * local[b];
            }
            acc += local[a] * row;
        }
        g.push(acc);
    }
    g
}

/// Sensitivity matrix with columns K_i u; at most 8 nonzero rows per column.
pub fn assemble_b(mesh: &Mesh, ke: &[[f64; 8]; 8], u: &[f64]) -> CsrMatrix {
    debug_assert_eq!(u.len(), mesh.num_free_dofs());
    let mut triplets = Vec::with_capacity(8 * mesh.num_elements());
    for elem in 0..mesh.num_elements() {
        let dofs = mesh.element_dofs(elem);
        let mut local = [0.0f64; 8];
        for (a, &d) in dofs.iter().enumerate() {
            if d != FIXED_DOF {
                local[a] = u[d];
            }
        }
        for a in 0..8 {
            let r = dofs[a];
            if r == FIXED_DOF {
                continue;
            }
            let mut acc = 0.0;
            for b in 0..8 {
                acc += ke[a][b] * local[b];
            }
            if acc != 0.0 {
                triplets.push((r, elem, acc));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.num_free_dofs(), mesh.num_elements(), &triplets)
}

/// Compliance 1/2 f^T u.
pub fn compliance(f: &[f64], u: &[f64]) -> f64 {
    debug_assert_eq!(f.len(), u.len());
    0.5 * crate::sparse::dot(f, u)
}

/// Full problem description: geometry, refinement, data and model.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub coarse_nx: usize,
    pub coarse_ny: usize,
    pub levels: usize,
    pub bc: FixedBoundary,
    pub load: LoadPoint,
    pub volume: f64,
    pub x_upper: f64,
    pub young: f64,
    pub poisson: f64,
    pub model: ModelKind,
}

impl ProblemSpec {
    /// Benchmark presets. Volume is half of the attainable maximum of the
    /// variable-thickness problems (uniform start density 1.0).
    pub fn preset(name: &str, levels: usize) -> Result<ProblemSpec> {
        let (coarse_nx, coarse_ny, bc, load, x_upper, model) = match name {
            "ex1" => (
                2,
                2,
                FixedBoundary::LeftEdge,
                LoadPoint::RightEdgeMiddle,
                2.0,
                ModelKind::Vts,
            ),
            "ex2" => (
                4,
                2,
                FixedBoundary::LeftEdge,
                LoadPoint::RightEdgeMiddle,
                2.0,
                ModelKind::Vts,
            ),
            "ex3" => (
                8,
                2,
                FixedBoundary::BottomCorners,
                LoadPoint::BottomEdgeMiddle,
                2.0,
                ModelKind::Vts,
            ),
            "ex4" => (
                4,
                2,
                FixedBoundary::LeftEdge,
                LoadPoint::RightEdgeMiddle,
                3.0,
                ModelKind::Simp {
                    penal: 3.0,
                    r_min: 2.0,
                    metric: DistanceMetric::Manhattan,
                },
            ),
            other => return Err(Error::UnknownPreset(other.to_string())),
        };
        let spec = ProblemSpec {
            coarse_nx,
            coarse_ny,
            levels,
            bc,
            load,
            volume: 0.0,
            x_upper,
            young: 1.0,
            poisson: 0.3,
            model,
        };
        let m = spec.num_finest_elements();
        let spec = ProblemSpec {
            volume: m as f64,
            ..spec
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 1 {
            return Err(Error::InvalidConfig("levels must be >= 1".into()));
        }
        let m = self.num_finest_elements() as f64;
        if !(self.volume > 0.0 && self.volume < m * self.x_upper) {
            return Err(Error::InvalidConfig(format!(
                "volume {} outside the strictly feasible range (0, {})",
                self.volume,
                m * self.x_upper
            )));
        }
        if let ModelKind::Simp { penal, r_min, .. } = self.model {
            if penal < 1.0 || r_min <= 0.0 {
                return Err(Error::InvalidConfig(
                    "simp model needs penal >= 1 and r_min > 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// Element counts of level k (1 = coarsest).
    pub fn elements_at(&self, level: usize) -> (usize, usize) {
        assert!(level >= 1 && level <= self.levels);
        let scale = 1usize << (level - 1);
        (self.coarse_nx * scale, self.coarse_ny * scale)
    }

    pub fn mesh_at(&self, level: usize) -> Mesh {
        let (nx, ny) = self.elements_at(level);
        Mesh::new(nx, ny, self.bc)
    }

    pub fn finest_mesh(&self) -> Mesh {
        self.mesh_at(self.levels)
    }

    pub fn num_finest_elements(&self) -> usize {
        let (nx, ny) = self.elements_at(self.levels);
        nx * ny
    }

    pub fn finest_free_dof_count(&self) -> usize {
        let (nx, ny) = self.elements_at(self.levels);
        free_dof_count(nx, ny, self.bc)
    }

    pub fn element_stiffness(&self) -> [[f64; 8]; 8] {
        element_stiffness(self.young, self.poisson)
    }
}
