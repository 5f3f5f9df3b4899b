//! One interior-point run on the square cantilever preset, multigrid-CG
//! inner solves, with the per-barrier iteration log.
//!
//! ```text
//! cargo run --release --example interior_point_run
//! ```

use topopt::fem::ProblemSpec;
use topopt::ipm::{IpmConfig, IpmSolver};

fn main() {
    let levels = 4;
    let problem = ProblemSpec::preset("ex1", levels).unwrap();
    println!(
        "square cantilever, {} refinement levels: {} elements, {} free dofs",
        levels,
        problem.num_finest_elements(),
        problem.finest_free_dof_count()
    );

    let solver = IpmSolver::new(problem, IpmConfig::default()).unwrap();
    let run = solver.solve().unwrap();

    println!(
        "\n{:>5} {:>11} {:>7} {:>9} {:>14} {:>12} {:>8}",
        "outer", "barrier", "newton", "cg iters", "objective", "kkt error", "alpha"
    );
    for row in &run.rows {
        println!(
            "{:>5} {:>11.3e} {:>7} {:>9} {:>14.8} {:>12.3e} {:>8.4}",
            row.outer_iter,
            row.barrier_lower,
            row.newton_steps,
            row.cg_iterations,
            row.objective,
            row.kkt_error,
            row.step_length
        );
    }
    println!(
        "\nfeval {}, total CG {}, avg CG per system {:.2}",
        run.feval,
        run.total_cg_iterations,
        run.total_cg_iterations as f64 / run.feval as f64
    );
    println!(
        "objective {:.8}, smallest density {:.3e}, volume drift {:.2e}",
        run.objective,
        run.state
            .density
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min),
        run.max_volume_drift
    );
}
