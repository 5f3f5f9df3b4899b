//! The penalized model with a density filter: filter properties, then a
//! full interior-point run on the filtered preset. Note the late barriers
//! doing most of the Newton work, unlike the convex runs.
//!
//! ```text
//! cargo run --release --example penalized_filter
//! ```

use topopt::fem::{DistanceMetric, ProblemSpec};
use topopt::ipm::{IpmConfig, IpmSolver};
use topopt::krylov::StopMode;
use topopt::simp::build_filter;

fn main() {
    let problem = ProblemSpec::preset("ex4", 3).unwrap();
    let mesh = problem.finest_mesh();

    let filter = build_filter(&mesh, 2.0, DistanceMetric::Manhattan);
    let m = mesh.num_elements();
    let col_sums = filter.weights().spmv_transpose(&vec![1.0; m]).unwrap();
    let worst_col = col_sums
        .iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0f64, f64::max);
    let x: Vec<f64> = (0..m).map(|i| 0.2 + (i % 7) as f64 * 0.2).collect();
    let filtered = filter.apply(&x);
    println!(
        "filter on the {}x{} mesh: worst column-sum error {:.2e}, volume before/after {:.6} / {:.6}",
        mesh.nx(),
        mesh.ny(),
        worst_col,
        x.iter().sum::<f64>(),
        filtered.iter().sum::<f64>()
    );

    // the literal product stopping rule keeps the nonconvex Newton iteration
    // stable on the iterative arm
    let config = IpmConfig {
        cg_stop_mode: StopMode::ProductLiteral,
        newton_cap: 200,
        ..IpmConfig::default()
    };
    let run = IpmSolver::new(problem, config).unwrap().solve().unwrap();
    let counts: Vec<usize> = run.rows.iter().map(|r| r.newton_steps).collect();
    println!(
        "\npenalized run: feval {}, objective {:.6}",
        run.feval, run.objective
    );
    println!("newton steps per barrier: {counts:?}");
}
