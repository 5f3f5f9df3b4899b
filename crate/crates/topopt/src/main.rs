//! Batch front end. Two subcommands:
//!
//! ```text
//! topopt run     --preset ex1 --levels 4 --solver ipm --linear mgcg --out results/
//! topopt compare --preset ex1 --levels 3 --solver ipm --b-solver oc --out results/
//! ```
//!
//! Every flag has a config-file equivalent (`--config FILE`, flat
//! `key = value` lines); flags given on the command line override the file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use topopt::experiment::{self, RunConfigBuilder, SolverRows};

const USAGE: &str = "\
usage:
  topopt run     [options]
  topopt compare [options] [--b-<option> ...]

options (each also accepted as a `key = value` config line):
  --config FILE            read settings from a flat key=value file first
  --preset {ex1,ex2,ex3,ex4}
  --levels N               mesh refinement levels (default 3)
  --solver {ipm,oc,doc,aoc}
  --linear {mgcg,direct}
  --model {vts,simp}       (--penal, --r-min, --metric tune the simp model)
  --tau-ip F               outer interior-point tolerance (default 1e-8)
  --tau-oc F               objective-change tolerance of the OC family (1e-5)
  --cg-tol F               inner solve tolerance (1e-2 ipm, 1e-4 oc)
  --cg-tol-mode {fixed,decreasing}
  --cg-stop-mode {relative,product}  residual scaling of the inner solves
  --x-lower F              artificial lower density bound of OC (1e-9)
  --out DIR                write density.pgm, density.csv, log.csv, summary.json
  --seed N                 recorded in the summary; reserved

compare runs the flags above as arm A; arm B starts as a copy and applies
any flag given with a `--b-` prefix (for example --b-solver oc --b-linear
direct). Both arms share the problem geometry.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("run") => dispatch_run(&args[1..]),
        Some("compare") => dispatch_compare(&args[1..]),
        Some("--help") | Some("-h") | Some("help") => {
            print!("{USAGE}");
            ExitCode::SUCCESS
        }
        _ => {
            eprint!("{USAGE}");
            ExitCode::FAILURE
        }
    }
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::FAILURE
}

/// Split raw flags into (key, value) pairs, reading --config files inline.
/// Returns the settings carrying a `--b-` prefix for the compare arm.
fn collect_settings(
    args: &[String],
    builder: &mut RunConfigBuilder,
) -> Result<Vec<(String, String)>, String> {
    let mut b_settings = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let flag = &args[i];
        let Some(key) = flag.strip_prefix("--") else {
            return Err(format!("unexpected argument '{flag}'"));
        };
        let value = args
            .get(i + 1)
            .ok_or_else(|| format!("flag --{key} needs a value"))?;
        if key == "config" {
            builder
                .load_file(Path::new(value))
                .map_err(|e| e.to_string())?;
        } else if let Some(b_key) = key.strip_prefix("b-") {
            b_settings.push((b_key.to_string(), value.clone()));
        } else {
            builder.set(key, value);
        }
        i += 2;
    }
    Ok(b_settings)
}

fn dispatch_run(args: &[String]) -> ExitCode {
    let mut builder = RunConfigBuilder::new();
    let b_extras = match collect_settings(args, &mut builder) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    if !b_extras.is_empty() {
        return fail("--b- flags are only valid with the compare subcommand");
    }
    let config = match builder.build() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match experiment::run(&config) {
        Ok(output) => {
            print_run_report(&output);
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn dispatch_compare(args: &[String]) -> ExitCode {
    let mut builder = RunConfigBuilder::new();
    let b_settings = match collect_settings(args, &mut builder) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let mut builder_b = builder.clone();
    for (key, value) in &b_settings {
        builder_b.set(key, value);
    }
    let mut config_a = match builder.build() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let mut config_b = match builder_b.build() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    // artifacts of the two arms go to out/a and out/b
    let out_root = config_a.out_dir.clone();
    if let Some(root) = &out_root {
        config_a.out_dir = Some(root.join("a"));
        config_b.out_dir = Some(root.join("b"));
    }
    match experiment::compare(&config_a, &config_b) {
        Ok(report) => {
            print!("{}", report.to_text());
            if let Some(root) = &out_root {
                if let Err(e) = write_comparison(root, &report.to_json()) {
                    return fail(e);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn write_comparison(root: &PathBuf, json: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(root)?;
    std::fs::write(root.join("comparison.json"), json)
}

fn print_run_report(output: &experiment::RunOutput) {
    let t = &output.log.totals;
    println!(
        "{} ({}) finished: {} outer iterations, feval {}, total CG {}, avg CG/solve {:.2}",
        output.log.solver,
        output.log.linear,
        output.log.outer_iterations,
        t.feval,
        t.total_cg_iterations,
        t.avg_cg_per_solve
    );
    println!(
        "objective {:.8}, x_min {:.3e}, solver wall {:.3}s",
        t.objective, t.x_min, t.solver_wall_seconds
    );
    match &output.log.rows {
        SolverRows::Ipm(rows) => {
            println!(
                "{:>5} {:>10} {:>7} {:>9} {:>14} {:>12} {:>10}",
                "outer", "s", "newton", "cg iters", "objective", "kkt error", "alpha"
            );
            for r in rows {
                println!(
                    "{:>5} {:>10.3e} {:>7} {:>9} {:>14.8} {:>12.3e} {:>10.4}",
                    r.outer_iter,
                    r.barrier_lower,
                    r.newton_steps,
                    r.cg_iterations,
                    r.objective,
                    r.kkt_error,
                    r.step_length
                );
            }
        }
        SolverRows::Oc(rows) => {
            println!(
                "{:>5} {:>14} {:>12} {:>12} {:>9} {:>9}",
                "iter", "objective", "delta", "lambda", "cg iters", "cg tol"
            );
            for r in rows {
                println!(
                    "{:>5} {:>14.8} {:>12.3e} {:>12.6} {:>9} {:>9.1e}",
                    r.iteration,
                    r.objective,
                    r.delta_objective,
                    r.lambda,
                    r.cg_iterations,
                    r.cg_tol
                );
            }
        }
    }
    for w in &output.log.warnings {
        eprintln!("warning: {w}");
    }
}
