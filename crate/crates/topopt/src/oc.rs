//! Optimality-criteria methods: the fixed-point update with volume
//! bisection, its damped variant, and the averaged variant that smooths the
//! zig-zagging of the plain iteration.
//!
//! The multiplicative update x_i <- x_i (u^T K_i u)^q / lambda is projected
//! on the bound constraints, with lambda found by bisection so the volume
//! constraint holds. Stopping watches the change of the load work f^T u
//! between iterations; when the inner linear solves are iterative, an
//! observed objective increase rolls the iterate back, tightens the solve
//! tolerance by a factor of ten and retries, preserving feasible descent.

use crate::cholesky::cholesky_factor;
use crate::error::{Error, Result};
use crate::fem::{assemble_load, compliance, Mesh, ProblemSpec, StiffnessPattern};
use crate::ipm::LinearSolverKind;
use crate::krylov::{pcg, StoppingRule};
use crate::model::Model;
use crate::multigrid::{GridTransfers, MultigridHierarchy, SmootherConfig};
use crate::sparse::dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcVariant {
    Standard,
    Damped,
    Averaged,
}

#[derive(Debug, Clone)]
pub struct OcConfig {
    pub variant: OcVariant,
    /// damping exponent q of the damped variant
    pub damping: f64,
    /// bisection bracket-width tolerance
    pub tau_bisection: f64,
    /// stop when |f^T u_k - f^T u_{k-1}| falls below this
    pub tau_objective: f64,
    /// strictly positive lower density bound keeping K(x) nonsingular
    pub x_lower: f64,
    /// initial tolerance of the iterative equilibrium solves
    pub cg_tol: f64,
    /// multiplier applied to cg_tol whenever the objective increases
    pub cg_tol_shrink: f64,
    /// abort threshold for the adaptive tolerance
    pub cg_tol_floor: f64,
    pub lambda_max: f64,
    pub max_outer: usize,
    pub cg_max_iters: usize,
    pub linear_solver: LinearSolverKind,
    pub smoother: SmootherConfig,
}

impl Default for OcConfig {
    fn default() -> Self {
        OcConfig {
            variant: OcVariant::Standard,
            damping: 0.5,
            tau_bisection: 1e-11,
            tau_objective: 1e-5,
            x_lower: 1e-9,
            cg_tol: 1e-4,
            cg_tol_shrink: 0.1,
            cg_tol_floor: 1e-12,
            lambda_max: 1e4,
            max_outer: 5000,
            cg_max_iters: 1000,
            linear_solver: LinearSolverKind::MgCg,
            smoother: SmootherConfig::default(),
        }
    }
}

/// The projected multiplicative update at a fixed multiplier.
fn update_at(
    x: &[f64],
    g: &[f64],
    exponent: f64,
    lambda: f64,
    x_lower: f64,
    x_upper: f64,
) -> Vec<f64> {
    x.iter()
        .zip(g)
        .map(|(xi, gi)| {
            let drive = if exponent == 1.0 {
                *gi
            } else {
                gi.powf(exponent)
            };
            (xi * drive / lambda).clamp(x_lower, x_upper)
        })
        .collect()
}

/// Bisection on the volume multiplier: returns lambda and the projected
/// update with sum(x) = V to bisection accuracy. The bracket [0, lambda_max]
/// follows the classic listing; an unreachable volume (for instance when all
/// energies vanish) is reported as an error.
#[allow(clippy::too_many_arguments)]
pub fn bisect_lambda(
    x: &[f64],
    g: &[f64],
    exponent: f64,
    volume: f64,
    x_lower: f64,
    x_upper: f64,
    lambda_max: f64,
    tau_bisection: f64,
) -> Result<(f64, Vec<f64>)> {
    debug_assert_eq!(x.len(), g.len());
    let mut lo = 0.0f64;
    let mut hi = lambda_max;
    // the update is nonincreasing in lambda; if even the largest multiplier
    // keeps the volume above target the bracket cannot contain a root
    let at_hi: f64 = update_at(x, g, exponent, hi, x_lower, x_upper).iter().sum();
    if at_hi > volume {
        return Err(Error::VolumeUnreachable {
            attained: at_hi,
            target: volume,
        });
    }
    let mut lambda = 0.5 * (lo + hi);
    let mut x_new = update_at(x, g, exponent, lambda, x_lower, x_upper);
    while hi - lo > tau_bisection {
        lambda = 0.5 * (lo + hi);
        x_new = update_at(x, g, exponent, lambda, x_lower, x_upper);
        let total: f64 = x_new.iter().sum();
        if total > volume {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }
    let total: f64 = x_new.iter().sum();
    if (total - volume).abs() > 1e-3 * volume {
        return Err(Error::VolumeUnreachable {
            attained: total,
            target: volume,
        });
    }
    Ok((lambda, x_new))
}

/// One projected update from a displacement field (plain or damped form).
pub fn oc_step(
    x: &[f64],
    u: &[f64],
    mesh: &Mesh,
    ke: &[[f64; 8]; 8],
    config: &OcConfig,
    volume: f64,
    x_upper: f64,
) -> Result<Vec<f64>> {
    let g = crate::fem::element_energies(mesh, ke, u);
    let exponent = match config.variant {
        OcVariant::Damped => config.damping,
        _ => 1.0,
    };
    let (_, x_new) = bisect_lambda(
        x,
        &g,
        exponent,
        volume,
        config.x_lower,
        x_upper,
        config.lambda_max,
        config.tau_bisection,
    )?;
    Ok(x_new)
}

#[derive(Debug, Clone)]
pub struct OcIterationRow {
    pub iteration: usize,
    pub objective: f64,
    /// change of f^T u against the previous iteration
    pub delta_objective: f64,
    pub lambda: f64,
    pub cg_iterations: usize,
    pub cg_tol: f64,
}

#[derive(Debug)]
pub struct OcRun {
    /// raw density field, clamped to [x_lower, x_upper]
    pub density: Vec<f64>,
    /// density with entries at the artificial lower bound set to zero
    pub zeroed_density: Vec<f64>,
    pub rows: Vec<OcIterationRow>,
    pub iterations: usize,
    pub feval: usize,
    pub total_cg_iterations: usize,
    pub objective: f64,
    pub converged: bool,
    pub max_volume_error: f64,
    pub warnings: Vec<String>,
}

pub struct OcSolver {
    problem: ProblemSpec,
    mesh: Mesh,
    ke: [[f64; 8]; 8],
    pattern: StiffnessPattern,
    transfers: Option<GridTransfers>,
    model: Model,
    f: Vec<f64>,
    config: OcConfig,
}

impl OcSolver {
    pub fn new(problem: ProblemSpec, config: OcConfig) -> Result<OcSolver> {
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
        Ok(OcSolver {
            problem,
            mesh,
            ke,
            pattern,
            transfers,
            model,
            f,
            config,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    fn equilibrium(&self, x: &[f64], cg_tol: f64) -> Result<(Vec<f64>, usize)> {
        let weights = self.model.stiffness_weights(x);
        let k = self.pattern.assemble(&weights);
        match self.config.linear_solver {
            LinearSolverKind::Direct => {
                let factor = cholesky_factor(&k)?;
                Ok((factor.solve(&self.f)?, 0))
            }
            LinearSolverKind::MgCg => {
                let transfers = self.transfers.as_ref().expect("transfers built for mgcg");
                let hierarchy =
                    MultigridHierarchy::build(k.clone(), transfers, false, self.config.smoother)?;
                let out = pcg(
                    &k,
                    &self.f,
                    &hierarchy,
                    &StoppingRule::relative(cg_tol),
                    self.config.cg_max_iters,
                    &vec![0.0; self.f.len()],
                )?;
                Ok((out.solution, out.iterations))
            }
        }
    }

    fn gradient(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        self.model.gradient_energies(&self.mesh, &self.ke, u, x)
    }

    fn projected_update(&self, x: &[f64], g: &[f64], exponent: f64) -> Result<(f64, Vec<f64>)> {
        bisect_lambda(
            x,
            g,
            exponent,
            self.problem.volume,
            self.config.x_lower,
            self.problem.x_upper,
            self.config.lambda_max,
            self.config.tau_bisection,
        )
    }

    /// Run the configured variant until the objective change falls below the
    /// tolerance or the iteration cap is reached.
    pub fn solve(&self) -> Result<OcRun> {
        let cfg = &self.config;
        let volume = self.problem.volume;
        let m = self.mesh.num_elements();
        let mut warnings = Vec::new();
        let mut cg_tol = cfg.cg_tol;
        let iterative = cfg.linear_solver == LinearSolverKind::MgCg;

        let mut x = vec![volume / m as f64; m];
        let (mut u, cg0) = self.equilibrium(&x, cg_tol)?;
        let mut feval = 1usize;
        let mut total_cg = 0usize;
        // CG work not yet attributed to a logged iteration: the initial
        // solve, plus any discarded attempt and its rollback re-solve; it is
        // charged to the next accepted row so the log rows aggregate exactly
        // to the totals
        let mut pending_cg = cg0;
        let mut work = dot(&self.f, &u); // f^T u drives the stopping test
        let mut rows: Vec<OcIterationRow> = Vec::new();
        let mut converged = false;
        let mut max_volume_error = (x.iter().sum::<f64>() - volume).abs();

        let mut iteration = 0usize;
        while iteration < cfg.max_outer {
            // propose the next iterate from the current displacement
            let exponent = match cfg.variant {
                OcVariant::Damped => cfg.damping,
                _ => 1.0,
            };
            let mut cg_step = 0usize;
            let (lambda, x_next) = match cfg.variant {
                OcVariant::Averaged => {
                    let g = self.gradient(&x, &u);
                    let (_, first) = self.projected_update(&x, &g, 1.0)?;
                    let (u_mid, cg_mid) = self.equilibrium(&first, cg_tol)?;
                    feval += 1;
                    cg_step += cg_mid;
                    let g_mid = self.gradient(&first, &u_mid);
                    let (lambda, second) = self.projected_update(&first, &g_mid, 1.0)?;
                    let averaged: Vec<f64> = first
                        .iter()
                        .zip(&second)
                        .map(|(a, b)| 0.5 * (a + b))
                        .collect();
                    (lambda, averaged)
                }
                _ => {
                    let g = self.gradient(&x, &u);
                    self.projected_update(&x, &g, exponent)?
                }
            };
            let (u_next, cg_next) = self.equilibrium(&x_next, cg_tol)?;
            feval += 1;
            cg_step += cg_next;
            let work_next = dot(&self.f, &u_next);

            if work_next > work && iterative {
                // the inexact solve broke descent: tighten, roll back, retry
                cg_tol *= cfg.cg_tol_shrink;
                if cg_tol < cfg.cg_tol_floor {
                    return Err(Error::DescentStall { cg_tol });
                }
                let (u_retry, cg_retry) = self.equilibrium(&x, cg_tol)?;
                feval += 1;
                pending_cg += cg_step + cg_retry;
                u = u_retry;
                work = dot(&self.f, &u);
                continue;
            }

            iteration += 1;
            let row_cg = cg_step + pending_cg;
            pending_cg = 0;
            total_cg += row_cg;
            let delta = (work_next - work).abs();
            rows.push(OcIterationRow {
                iteration,
                objective: 0.5 * work_next,
                delta_objective: delta,
                lambda,
                cg_iterations: row_cg,
                cg_tol,
            });
            max_volume_error = max_volume_error.max((x_next.iter().sum::<f64>() - volume).abs());
            x = x_next;
            u = u_next;
            work = work_next;
            if delta <= cfg.tau_objective {
                converged = true;
                break;
            }
        }
        // leftover only when the iteration cap truncated the run mid-flight
        total_cg += pending_cg;
        if !converged {
            warnings.push(format!(
                "objective change was still above {:e} after {} iterations",
                cfg.tau_objective, iteration
            ));
        }

        let floor_cut = cfg.x_lower * (1.0 + 1e-9);
        let zeroed_density: Vec<f64> = x
            .iter()
            .map(|&v| if v <= floor_cut { 0.0 } else { v })
            .collect();
        let objective = compliance(&self.f, &u);
        Ok(OcRun {
            density: x,
            zeroed_density,
            rows,
            iterations: iteration,
            feval,
            total_cg_iterations: total_cg,
            objective,
            converged,
            max_volume_error,
            warnings,
        })
    }
}
