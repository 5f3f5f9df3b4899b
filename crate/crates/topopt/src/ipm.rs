//! Primal-dual interior point method.
//!
//! The perturbed first-order system couples equilibrium, the volume
//! constraint, stationarity and the two barrier-relaxed complementarity
//! blocks. Each Newton step eliminates the bound-multiplier blocks (they are
//! diagonal), then takes the Schur complement onto the displacement and the
//! volume multiplier, leaving one sparse SPD "augmented" system with arrow
//! sparsity: banded except for a dense final row and column. That system is
//! solved either by multigrid-preconditioned conjugate gradients or by the
//! direct reference factorization; the remaining step components are
//! recovered by closed-form back-substitution.
//!
//! Residual sign conventions, fixed once here and used everywhere:
//!
//! ```text
//! equilibrium   = f - K(x) u
//! volume        = V - sum(x)
//! stationarity  = 1/2 d(u^T K u)/dx_i + lambda + phi_i - psi_i
//! comp_lower    = s - phi_i x_i
//! comp_upper    = r - psi_i (xbar - x_i)
//! reduced       = -stationarity - comp_lower / x + comp_upper / (xbar - x)
//! ```
//!
//! `reduced` is the stationarity residual of the barrier problem (the
//! combination left in the third block row after eliminating the bound
//! multipliers); the Newton system it belongs to reads
//!
//! ```text
//! [ K    0   B  ] [d_u  ]   [ equilibrium ]
//! [ 0    0   e^T] [d_lam] = [ volume      ]
//! [ B^T  e  -D  ] [d_x  ]   [ reduced     ]
//! ```
//!
//! with D = diag(phi/x + psi/(xbar - x)).

use crate::cholesky::cholesky_factor;
use crate::error::{Error, Result};
use crate::fem::{assemble_load, compliance, Mesh, ProblemSpec, StiffnessPattern};
use crate::krylov::{pcg, PcgOutcome, StopMode, StoppingRule};
use crate::model::Model;
use crate::multigrid::{GridTransfers, MultigridHierarchy, SmootherConfig};
use crate::sparse::{dot, norm2, CsrMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSolverKind {
    MgCg,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgTolMode {
    Fixed,
    /// halve the tolerance after every barrier reduction
    Decreasing,
}

#[derive(Debug, Clone)]
pub struct IpmConfig {
    /// reduction factor of the lower-bound barrier
    pub sigma_s: f64,
    /// reduction factor of the upper-bound barrier
    pub sigma_r: f64,
    /// inexact Newton tolerance, kept constant over the run
    pub tau_newton: f64,
    /// outer tolerance on max(s, r)
    pub tau_ip: f64,
    /// fraction of the distance to the boundary a step may take
    pub step_shrink: f64,
    pub cg_tol: f64,
    pub cg_tol_mode: CgTolMode,
    pub cg_stop_mode: StopMode,
    pub cg_max_iters: usize,
    /// Newton steps allowed per barrier value before aborting
    pub newton_cap: usize,
    pub linear_solver: LinearSolverKind,
    pub smoother: SmootherConfig,
}

impl Default for IpmConfig {
    fn default() -> Self {
        IpmConfig {
            sigma_s: 0.2,
            sigma_r: 0.2,
            tau_newton: 1e-1,
            tau_ip: 1e-8,
            step_shrink: 0.9,
            cg_tol: 1e-2,
            cg_tol_mode: CgTolMode::Fixed,
            cg_stop_mode: StopMode::Relative,
            cg_max_iters: 1000,
            newton_cap: 50,
            linear_solver: LinearSolverKind::MgCg,
            smoother: SmootherConfig::default(),
        }
    }
}

/// Primal and dual iterate of the interior point method.
#[derive(Debug, Clone)]
pub struct IpmState {
    pub displacement: Vec<f64>,
    pub volume_multiplier: f64,
    pub density: Vec<f64>,
    pub lower_multipliers: Vec<f64>,
    pub upper_multipliers: Vec<f64>,
    /// barrier on the lower-bound complementarity
    pub barrier_lower: f64,
    /// barrier on the upper-bound complementarity
    pub barrier_upper: f64,
}

#[derive(Debug, Clone)]
pub struct ResidualBundle {
    pub equilibrium: Vec<f64>,
    pub volume: f64,
    pub stationarity: Vec<f64>,
    pub comp_lower: Vec<f64>,
    pub comp_upper: Vec<f64>,
    /// stationarity of the barrier problem; right-hand side of the reduced
    /// third block row
    pub reduced: Vec<f64>,
}

/// Residuals of the perturbed first-order system at a state, given the
/// energy gradient g and the current stiffness action K(x) u.
pub fn compute_residual_bundle(
    state: &IpmState,
    gradient_energies: &[f64],
    stiffness_times_u: &[f64],
    f: &[f64],
    volume_target: f64,
    x_upper: f64,
) -> ResidualBundle {
    let x = &state.density;
    let phi = &state.lower_multipliers;
    let psi = &state.upper_multipliers;
    let equilibrium: Vec<f64> = f
        .iter()
        .zip(stiffness_times_u)
        .map(|(fi, ki)| fi - ki)
        .collect();
    let volume = volume_target - x.iter().sum::<f64>();
    let stationarity: Vec<f64> = (0..x.len())
        .map(|i| 0.5 * gradient_energies[i] + state.volume_multiplier + phi[i] - psi[i])
        .collect();
    let comp_lower: Vec<f64> = (0..x.len())
        .map(|i| state.barrier_lower - phi[i] * x[i])
        .collect();
    let comp_upper: Vec<f64> = (0..x.len())
        .map(|i| state.barrier_upper - psi[i] * (x_upper - x[i]))
        .collect();
    let reduced: Vec<f64> = (0..x.len())
        .map(|i| -stationarity[i] - comp_lower[i] / x[i] + comp_upper[i] / (x_upper - x[i]))
        .collect();
    ResidualBundle {
        equilibrium,
        volume,
        stationarity,
        comp_lower,
        comp_upper,
        reduced,
    }
}

/// Diagonal scaling D = phi/x + psi/(xbar - x); positive on the interior.
pub fn interior_scaling(x: &[f64], phi: &[f64], psi: &[f64], x_upper: f64) -> Result<Vec<f64>> {
    let mut d = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let gap_upper = x_upper - x[i];
        let value = phi[i] / x[i] + psi[i] / gap_upper;
        if value <= 0.0 || !value.is_finite() {
            return Err(Error::LeftInterior { index: i });
        }
        d.push(value);
    }
    Ok(d)
}

/// Schur complement of the reduced Newton system onto (d_u, d_lambda):
/// Z = [[K, 0], [0, 0]] + [B; e^T] D^{-1} [B^T, e], with the matching
/// right-hand side. Z is SPD with arrow sparsity.
pub fn build_augmented_system(
    stiffness: &CsrMatrix,
    sensitivity: &CsrMatrix,
    scaling: &[f64],
    bundle: &ResidualBundle,
) -> Result<(CsrMatrix, Vec<f64>)> {
    let n = stiffness.nrows();
    let m = scaling.len();
    if sensitivity.nrows() != n || sensitivity.ncols() != m {
        return Err(Error::DimensionMismatch {
            context: "augmented system",
            expected: n,
            found: sensitivity.nrows(),
        });
    }
    let inv_sqrt: Vec<f64> = scaling.iter().map(|d| 1.0 / d.sqrt()).collect();
    let inv: Vec<f64> = scaling.iter().map(|d| 1.0 / d).collect();
    let b_scaled = sensitivity.scale_columns(&inv_sqrt);
    let outer = b_scaled.matmul(&b_scaled.transpose())?;
    let block = stiffness.add(&outer)?;
    // arrow column B D^{-1} e and corner e^T D^{-1} e
    let arrow = sensitivity.spmv(&inv)?;
    let corner: f64 = inv.iter().sum();

    let mut row_offsets = Vec::with_capacity(n + 2);
    let mut col_indices = Vec::with_capacity(block.nnz() + 2 * n + 1);
    let mut values = Vec::with_capacity(block.nnz() + 2 * n + 1);
    row_offsets.push(0);
    for i in 0..n {
        let (cols, vals) = block.row(i);
        col_indices.extend_from_slice(cols);
        values.extend_from_slice(vals);
        col_indices.push(n);
        values.push(arrow[i]);
        row_offsets.push(col_indices.len());
    }
    for (j, a) in arrow.iter().enumerate() {
        col_indices.push(j);
        values.push(*a);
    }
    col_indices.push(n);
    values.push(corner);
    row_offsets.push(col_indices.len());
    let z = CsrMatrix::from_raw(n + 1, n + 1, row_offsets, col_indices, values);

    // rhs = [equilibrium; volume] + [B; e^T] D^{-1} reduced
    let weighted: Vec<f64> = bundle
        .reduced
        .iter()
        .zip(&inv)
        .map(|(r, d)| r * d)
        .collect();
    let mut rhs = sensitivity.spmv(&weighted)?;
    for (out, eq) in rhs.iter_mut().zip(&bundle.equilibrium) {
        *out += eq;
    }
    rhs.push(bundle.volume + weighted.iter().sum::<f64>());
    Ok((z, rhs))
}

/// Back-substitution for the density step:
/// d_x = D^{-1} (B^T d_u + e d_lambda - reduced).
pub fn recover_density_step(
    sensitivity: &CsrMatrix,
    d_u: &[f64],
    d_lambda: f64,
    scaling: &[f64],
    bundle: &ResidualBundle,
) -> Vec<f64> {
    let mut bt_du = vec![0.0; sensitivity.ncols()];
    sensitivity.spmv_transpose_into(d_u, &mut bt_du);
    bt_du
        .iter()
        .zip(scaling.iter().zip(&bundle.reduced))
        .map(|(b, (d, red))| (b + d_lambda - red) / d)
        .collect()
}

/// Eliminated multiplier steps:
/// d_phi = X^{-1}(comp_lower - Phi d_x), d_psi = Xt^{-1}(comp_upper + Psi d_x).
pub fn recover_multiplier_steps(
    state: &IpmState,
    bundle: &ResidualBundle,
    d_x: &[f64],
    x_upper: f64,
) -> (Vec<f64>, Vec<f64>) {
    let x = &state.density;
    let phi = &state.lower_multipliers;
    let psi = &state.upper_multipliers;
    let d_phi: Vec<f64> = (0..x.len())
        .map(|i| (bundle.comp_lower[i] - phi[i] * d_x[i]) / x[i])
        .collect();
    let d_psi: Vec<f64> = (0..x.len())
        .map(|i| (bundle.comp_upper[i] + psi[i] * d_x[i]) / (x_upper - x[i]))
        .collect();
    (d_phi, d_psi)
}

/// Fraction-to-boundary step length: the largest alpha <= 1 keeping
/// values + alpha * direction strictly inside (0, upper), shortened by the
/// configured factor (0.9). Pass `f64::INFINITY` for a lower bound only.
pub fn step_length(values: &[f64], direction: &[f64], upper: f64, shrink: f64) -> f64 {
    debug_assert_eq!(values.len(), direction.len());
    let mut alpha_lower = f64::INFINITY;
    let mut alpha_upper = f64::INFINITY;
    for (v, d) in values.iter().zip(direction) {
        if *d < 0.0 {
            alpha_lower = alpha_lower.min(-v / d);
        } else if *d > 0.0 && upper.is_finite() {
            alpha_upper = alpha_upper.min((upper - v) / d);
        }
    }
    (shrink * alpha_lower).min(shrink * alpha_upper).min(1.0)
}

/// Inexact Newton termination:
/// ||equilibrium|| / ||f|| + ||reduced|| / (||phi|| + ||psi||) <= tau.
pub fn newton_stop(
    bundle: &ResidualBundle,
    f_norm: f64,
    phi: &[f64],
    psi: &[f64],
    tau: f64,
) -> bool {
    let term1 = norm2(&bundle.equilibrium) / f_norm;
    let term2 = norm2(&bundle.reduced) / (norm2(phi) + norm2(psi));
    term1 + term2 <= tau
}

/// Diagnostic residual combining the Newton test with the scaled
/// complementarity products; reported in logs, never used for control.
pub fn scaled_kkt_error(
    state: &IpmState,
    bundle: &ResidualBundle,
    f_norm: f64,
    x_upper: f64,
) -> f64 {
    let phi = &state.lower_multipliers;
    let psi = &state.upper_multipliers;
    let x = &state.density;
    let gaps: Vec<f64> = x.iter().map(|xi| x_upper - xi).collect();
    let denom = norm2(phi) * norm2(x);
    norm2(&bundle.equilibrium) / f_norm
        + norm2(&bundle.reduced) / (norm2(phi) + norm2(psi))
        + dot(phi, x) / denom
        + dot(psi, &gaps) / denom
}

/// Verdict of the central-path proximity bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximityCheck {
    pub pass: bool,
    pub max_violation: f64,
}

/// Checks the componentwise bound |x*_i - x_i| / (x*_i x_i) <= tau / s that
/// an inexact Newton solution keeps around its central-path point x*; the
/// bound follows from the scaled complementarity residual and tightens as
/// the barrier s goes to zero.
pub fn central_path_proximity(x: &[f64], x_star: &[f64], s: f64, tau: f64) -> ProximityCheck {
    debug_assert_eq!(x.len(), x_star.len());
    let bound = tau / s;
    let mut worst = 0.0f64;
    for (xi, xs) in x.iter().zip(x_star) {
        worst = worst.max((xs - xi).abs() / (xs * xi));
    }
    ProximityCheck {
        pass: worst <= bound,
        max_violation: (worst - bound).max(0.0),
    }
}

/// Number of barrier reductions until max(s, r) falls to the outer
/// tolerance; the outer iteration count of a run.
pub fn barrier_schedule_length(s0: f64, r0: f64, sigma_s: f64, sigma_r: f64, tau_ip: f64) -> usize {
    assert!(sigma_s > 0.0 && sigma_s < 1.0 && sigma_r > 0.0 && sigma_r < 1.0);
    let (mut s, mut r) = (s0, r0);
    let mut count = 0usize;
    while s.max(r) > tau_ip {
        s *= sigma_s;
        r *= sigma_r;
        count += 1;
        if count > 100_000 {
            break;
        }
    }
    count
}

/// One row of the per-outer-iteration log.
#[derive(Debug, Clone)]
pub struct IpmIterationRow {
    pub outer_iter: usize,
    pub barrier_lower: f64,
    pub barrier_upper: f64,
    pub newton_steps: usize,
    pub cg_iterations: usize,
    pub objective: f64,
    pub equilibrium_rel: f64,
    pub kkt_error: f64,
    pub step_length: f64,
}

#[derive(Debug)]
pub struct IpmRun {
    pub state: IpmState,
    pub rows: Vec<IpmIterationRow>,
    pub outer_iterations: usize,
    pub newton_steps: usize,
    /// linear systems solved, including the initial equilibrium solve
    pub feval: usize,
    pub total_cg_iterations: usize,
    pub objective: f64,
    /// largest |sum(x) - V| observed over all Newton steps
    pub max_volume_drift: f64,
    /// smallest of x, xbar - x, phi, psi over all accepted iterates
    pub min_interiority: f64,
    pub warnings: Vec<String>,
}

struct Linearization {
    stiffness: CsrMatrix,
    gradient_energies: Vec<f64>,
    stiffness_times_u: Vec<f64>,
}

/// Interior point solver bound to one problem instance.
pub struct IpmSolver {
    problem: ProblemSpec,
    mesh: Mesh,
    ke: [[f64; 8]; 8],
    pattern: StiffnessPattern,
    transfers: Option<GridTransfers>,
    model: Model,
    f: Vec<f64>,
    f_norm: f64,
    config: IpmConfig,
}

impl IpmSolver {
    pub fn new(problem: ProblemSpec, config: IpmConfig) -> Result<IpmSolver> {
        problem.validate()?;
        let mesh = problem.finest_mesh();
        let ke = problem.element_stiffness();
        let pattern = StiffnessPattern::new(&mesh, ke);
        let transfers = match config.linear_solver {
            LinearSolverKind::MgCg => Some(GridTransfers::build(&problem)?),
            LinearSolverKind::Direct => None,
        };
        let model = Model::from_spec(&problem, &mesh);
        let f = assemble_load(&mesh, problem.load)?;
        let f_norm = norm2(&f);
        Ok(IpmSolver {
            problem,
            mesh,
            ke,
            pattern,
            transfers,
            model,
            f,
            f_norm,
            config,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn load_vector(&self) -> &[f64] {
        &self.f
    }

    pub fn config(&self) -> &IpmConfig {
        &self.config
    }

    fn linearize(&self, state: &IpmState) -> Linearization {
        let weights = self.model.stiffness_weights(&state.density);
        let stiffness = self.pattern.assemble(&weights);
        let gradient_energies =
            self.model
                .gradient_energies(&self.mesh, &self.ke, &state.displacement, &state.density);
        let mut stiffness_times_u = vec![0.0; state.displacement.len()];
        stiffness.spmv_into(&state.displacement, &mut stiffness_times_u);
        Linearization {
            stiffness,
            gradient_energies,
            stiffness_times_u,
        }
    }

    fn residuals_from(&self, state: &IpmState, lin: &Linearization) -> ResidualBundle {
        compute_residual_bundle(
            state,
            &lin.gradient_energies,
            &lin.stiffness_times_u,
            &self.f,
            self.problem.volume,
            self.problem.x_upper,
        )
    }

    /// Residuals of the perturbed optimality system at `state`.
    pub fn compute_residuals(&self, state: &IpmState) -> ResidualBundle {
        let lin = self.linearize(state);
        self.residuals_from(state, &lin)
    }

    fn solve_spd(
        &self,
        a: &CsrMatrix,
        rhs: &[f64],
        augmented: bool,
        cg_tol: f64,
    ) -> Result<(Vec<f64>, usize, bool)> {
        match self.config.linear_solver {
            LinearSolverKind::Direct => {
                let factor = cholesky_factor(a)?;
                Ok((factor.solve(rhs)?, 0, true))
            }
            LinearSolverKind::MgCg => {
                let transfers = self.transfers.as_ref().expect("transfers built for mgcg");
                let hierarchy = MultigridHierarchy::build(
                    a.clone(),
                    transfers,
                    augmented,
                    self.config.smoother,
                )?;
                let stop = StoppingRule {
                    tol: cg_tol,
                    mode: self.config.cg_stop_mode,
                };
                let PcgOutcome {
                    solution,
                    iterations,
                    converged,
                    ..
                } = pcg(
                    a,
                    rhs,
                    &hierarchy,
                    &stop,
                    self.config.cg_max_iters,
                    &vec![0.0; rhs.len()],
                )?;
                Ok((solution, iterations, converged))
            }
        }
    }

    /// Initial point: uniform density V/m, its equilibrium displacement,
    /// unit multipliers and unit barriers. Returns the state and the cost of
    /// the initial solve in CG iterations.
    pub fn init_state(&self) -> Result<(IpmState, usize)> {
        let m = self.mesh.num_elements();
        let x = vec![self.problem.volume / m as f64; m];
        let weights = self.model.stiffness_weights(&x);
        let k = self.pattern.assemble(&weights);
        let (u, cg, _) = self.solve_spd(&k, &self.f, false, self.config.cg_tol)?;
        Ok((
            IpmState {
                displacement: u,
                volume_multiplier: 1.0,
                density: x,
                lower_multipliers: vec![1.0; m],
                upper_multipliers: vec![1.0; m],
                barrier_lower: 1.0,
                barrier_upper: 1.0,
            },
            cg,
        ))
    }

    /// Run the interior point method to max(s, r) <= tau_ip.
    pub fn solve(&self) -> Result<IpmRun> {
        let cfg = &self.config;
        let mut warnings = Vec::new();
        if cfg.tau_ip < 1e-12 {
            warnings.push(format!(
                "tau_ip = {:e} is beyond the validated regime; expect inexact-solver strain",
                cfg.tau_ip
            ));
        }
        let (mut state, init_cg) = self.init_state()?;
        let mut feval = 1usize;
        let mut total_cg = init_cg;
        let mut newton_total = 0usize;
        let mut cg_tol = cfg.cg_tol;
        let x_upper = self.problem.x_upper;
        let volume_target = self.problem.volume;

        let mut rows: Vec<IpmIterationRow> = Vec::new();
        let mut outer = 0usize;
        let mut newton_in_outer = 0usize;
        let mut cg_in_outer = init_cg;
        let mut last_alpha;
        let mut max_volume_drift: f64 = (state.density.iter().sum::<f64>() - volume_target).abs();
        let mut min_interiority = interiority(&state, x_upper);
        let mut cg_failures = 0usize;

        let mut lin = self.linearize(&state);
        let mut bundle = self.residuals_from(&state, &lin);

        'outer: loop {
            // one Newton step at the current barrier pair
            if newton_in_outer >= cfg.newton_cap {
                return Err(Error::NewtonCapExceeded {
                    barrier: state.barrier_lower.max(state.barrier_upper),
                    cap: cfg.newton_cap,
                });
            }
            let sensitivity = self.model.sensitivity_matrix(
                &self.mesh,
                &self.ke,
                &state.displacement,
                &state.density,
            )?;
            let scaling = interior_scaling(
                &state.density,
                &state.lower_multipliers,
                &state.upper_multipliers,
                x_upper,
            )?;
            let (z, rhs) = build_augmented_system(&lin.stiffness, &sensitivity, &scaling, &bundle)?;
            let (solution, cg_iters, converged) = self.solve_spd(&z, &rhs, true, cg_tol)?;
            if !converged {
                cg_failures += 1;
            }
            let n = state.displacement.len();
            let d_u = &solution[..n];
            let d_lambda = solution[n];
            let d_x = recover_density_step(&sensitivity, d_u, d_lambda, &scaling, &bundle);
            let (d_phi, d_psi) = recover_multiplier_steps(&state, &bundle, &d_x, x_upper);

            let alpha = step_length(&state.density, &d_x, x_upper, cfg.step_shrink)
                .min(step_length(
                    &state.lower_multipliers,
                    &d_phi,
                    f64::INFINITY,
                    cfg.step_shrink,
                ))
                .min(step_length(
                    &state.upper_multipliers,
                    &d_psi,
                    f64::INFINITY,
                    cfg.step_shrink,
                ));
            for (v, d) in state.displacement.iter_mut().zip(d_u) {
                *v += alpha * d;
            }
            state.volume_multiplier += alpha * d_lambda;
            for (v, d) in state.density.iter_mut().zip(&d_x) {
                *v += alpha * d;
            }
            for (v, d) in state.lower_multipliers.iter_mut().zip(&d_phi) {
                *v += alpha * d;
            }
            for (v, d) in state.upper_multipliers.iter_mut().zip(&d_psi) {
                *v += alpha * d;
            }
            last_alpha = alpha;
            feval += 1;
            newton_total += 1;
            newton_in_outer += 1;
            total_cg += cg_iters;
            cg_in_outer += cg_iters;
            max_volume_drift =
                max_volume_drift.max((state.density.iter().sum::<f64>() - volume_target).abs());
            min_interiority = min_interiority.min(interiority(&state, x_upper));

            lin = self.linearize(&state);
            bundle = self.residuals_from(&state, &lin);
            let stop = newton_stop(
                &bundle,
                self.f_norm,
                &state.lower_multipliers,
                &state.upper_multipliers,
                cfg.tau_newton,
            );
            if stop {
                outer += 1;
                rows.push(IpmIterationRow {
                    outer_iter: outer,
                    barrier_lower: state.barrier_lower,
                    barrier_upper: state.barrier_upper,
                    newton_steps: newton_in_outer,
                    cg_iterations: cg_in_outer,
                    objective: compliance(&self.f, &state.displacement),
                    equilibrium_rel: norm2(&bundle.equilibrium) / self.f_norm,
                    kkt_error: scaled_kkt_error(&state, &bundle, self.f_norm, x_upper),
                    step_length: last_alpha,
                });
                state.barrier_lower *= cfg.sigma_s;
                state.barrier_upper *= cfg.sigma_r;
                if cfg.cg_tol_mode == CgTolMode::Decreasing {
                    cg_tol *= 0.5;
                }
                if state.barrier_lower.max(state.barrier_upper) <= cfg.tau_ip {
                    break 'outer;
                }
                newton_in_outer = 0;
                cg_in_outer = 0;
                // comp residuals depend on the barrier pair
                bundle = self.residuals_from(&state, &lin);
            }
        }

        if cg_failures > 0 {
            warnings.push(format!(
                "{cg_failures} augmented solves hit the CG iteration cap; continued with the best iterate"
            ));
        }
        let objective = compliance(&self.f, &state.displacement);
        Ok(IpmRun {
            state,
            rows,
            outer_iterations: outer,
            newton_steps: newton_total,
            feval,
            total_cg_iterations: total_cg,
            objective,
            max_volume_drift,
            min_interiority,
            warnings,
        })
    }
}

fn interiority(state: &IpmState, x_upper: f64) -> f64 {
    let mut min = f64::INFINITY;
    for (i, &xi) in state.density.iter().enumerate() {
        min = min
            .min(xi)
            .min(x_upper - xi)
            .min(state.lower_multipliers[i])
            .min(state.upper_multipliers[i]);
    }
    min
}
