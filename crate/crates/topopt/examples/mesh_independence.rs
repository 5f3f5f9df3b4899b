//! Refinement study: the average number of preconditioned CG iterations per
//! Newton system stays flat (here: slightly decreasing) as the mesh is
//! refined, while the interior-point iteration count barely moves. This is
//! the multigrid preconditioner at work.
//!
//! ```text
//! cargo run --release --example mesh_independence
//! ```

use topopt::fem::ProblemSpec;
use topopt::ipm::{IpmConfig, IpmSolver};

fn main() {
    println!(
        "{:>6} {:>10} {:>6} {:>9} {:>9} {:>12}",
        "levels", "variables", "feval", "total CG", "avg CG", "objective"
    );
    for levels in 3..=6 {
        let problem = ProblemSpec::preset("ex1", levels).unwrap();
        let variables = problem.finest_free_dof_count();
        let run = IpmSolver::new(problem, IpmConfig::default())
            .unwrap()
            .solve()
            .unwrap();
        println!(
            "{:>6} {:>10} {:>6} {:>9} {:>9.2} {:>12.6}",
            levels,
            variables,
            run.feval,
            run.total_cg_iterations,
            run.total_cg_iterations as f64 / run.feval as f64,
            run.objective
        );
    }
}
