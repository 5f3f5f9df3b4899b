//! The optimality-criteria family side by side: the plain fixed-point
//! iteration zig-zags and crawls, damping (q = 1/2) tames it, and averaging
//! two successive updates is faster still.
//!
//! ```text
//! cargo run --release --example oc_variants
//! ```

use topopt::fem::ProblemSpec;
use topopt::oc::{OcConfig, OcSolver, OcVariant};

fn main() {
    let levels = 3;
    println!(
        "{:<10} {:>6} {:>9} {:>9} {:>14} {:>11}",
        "variant", "feval", "total CG", "avg CG", "objective", "converged"
    );
    for (name, variant) in [
        ("plain", OcVariant::Standard),
        ("damped", OcVariant::Damped),
        ("averaged", OcVariant::Averaged),
    ] {
        let problem = ProblemSpec::preset("ex1", levels).unwrap();
        let config = OcConfig {
            variant,
            ..OcConfig::default()
        };
        let run = OcSolver::new(problem, config).unwrap().solve().unwrap();
        println!(
            "{:<10} {:>6} {:>9} {:>9.2} {:>14.8} {:>11}",
            name,
            run.feval,
            run.total_cg_iterations,
            run.total_cg_iterations as f64 / run.feval as f64,
            run.objective,
            run.converged
        );
    }
}
