//! Interior point versus averaged OC on the same problem, through the
//! comparison harness: iteration totals side by side plus the distance
//! between the two final density fields.
//!
//! ```text
//! cargo run --release --example solver_comparison
//! ```

use topopt::experiment::{compare, RunConfig, SolverChoice};

fn main() {
    let mut arm_a = RunConfig::from_preset("ex1", 4).unwrap();
    arm_a.solver = SolverChoice::Ipm;
    let mut arm_b = arm_a.clone();
    arm_b.solver = SolverChoice::Aoc;

    let report = compare(&arm_a, &arm_b).unwrap();
    print!("{}", report.to_text());
}
