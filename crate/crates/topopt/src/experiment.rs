//! Batch runs: configuration, logging, artifact emission and the
//! solver-vs-solver comparison harness.
//!
//! A run executes one (problem, solver, linear-solver) pipeline and leaves
//! four artifacts in the output directory: `density.pgm` (8-bit graymap of
//! the final design), `density.csv` (raw values), `log.csv` (one row per
//! iteration) and `summary.json` (totals). Runs are deterministic: repeated
//! executions of the same configuration produce byte-identical logs; wall
//! times appear only in the summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::fem::{DistanceMetric, FixedBoundary, LoadPoint, ModelKind, ProblemSpec};
use crate::ipm::{CgTolMode, IpmConfig, IpmIterationRow, IpmSolver, LinearSolverKind};
use crate::krylov::StopMode;
use crate::oc::{OcConfig, OcIterationRow, OcSolver, OcVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Ipm,
    Oc,
    Doc,
    Aoc,
}

impl SolverChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SolverChoice::Ipm => "ipm",
            SolverChoice::Oc => "oc",
            SolverChoice::Doc => "doc",
            SolverChoice::Aoc => "aoc",
        }
    }
}

/// Everything a run needs; every field has a CLI flag and a config-file key.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub problem: ProblemSpec,
    pub solver: SolverChoice,
    pub linear: LinearSolverKind,
    pub tau_ip: f64,
    pub tau_oc: f64,
    /// None keeps the per-solver default (1e-2 interior point, 1e-4 OC)
    pub cg_tol: Option<f64>,
    pub cg_tol_mode: CgTolMode,
    /// None picks the residual scaling per model: relative for the
    /// variable-thickness problem, the literal product form for the
    /// penalized model, whose Newton iteration needs the tighter late-stage
    /// solves that rule enforces
    pub cg_stop_mode: Option<StopMode>,
    pub x_lower: f64,
    pub newton_cap: usize,
    pub max_outer: usize,
    pub out_dir: Option<PathBuf>,
    /// reserved for future randomized features; recorded, never used
    pub seed: u64,
}

impl RunConfig {
    pub fn from_preset(name: &str, levels: usize) -> Result<RunConfig> {
        Ok(RunConfig {
            preset: Some(name.to_string()),
            problem: ProblemSpec::preset(name, levels)?,
            solver: SolverChoice::Ipm,
            linear: LinearSolverKind::MgCg,
            tau_ip: 1e-8,
            tau_oc: 1e-5,
            cg_tol: None,
            cg_tol_mode: CgTolMode::Fixed,
            cg_stop_mode: None,
            x_lower: 1e-9,
            newton_cap: 50,
            max_outer: 5000,
            out_dir: None,
            seed: 0,
        })
    }

    fn effective_stop_mode(&self) -> StopMode {
        self.cg_stop_mode.unwrap_or(match self.problem.model {
            ModelKind::Vts => StopMode::Relative,
            ModelKind::Simp { .. } => StopMode::ProductLiteral,
        })
    }

    pub fn ipm_config(&self) -> IpmConfig {
        IpmConfig {
            tau_ip: self.tau_ip,
            cg_tol: self.cg_tol.unwrap_or(1e-2),
            cg_tol_mode: self.cg_tol_mode,
            cg_stop_mode: self.effective_stop_mode(),
            newton_cap: self.newton_cap,
            linear_solver: self.linear,
            ..IpmConfig::default()
        }
    }

    pub fn oc_config(&self) -> OcConfig {
        let variant = match self.solver {
            SolverChoice::Doc => OcVariant::Damped,
            SolverChoice::Aoc => OcVariant::Averaged,
            _ => OcVariant::Standard,
        };
        OcConfig {
            variant,
            tau_objective: self.tau_oc,
            x_lower: self.x_lower,
            cg_tol: self.cg_tol.unwrap_or(1e-4),
            max_outer: self.max_outer,
            linear_solver: self.linear,
            ..OcConfig::default()
        }
    }
}

/// Accumulates key/value settings from a config file and CLI flags (flags
/// win by being applied last) and builds the final `RunConfig`.
#[derive(Debug, Default, Clone)]
pub struct RunConfigBuilder {
    entries: Vec<(String, String)>,
}

impl RunConfigBuilder {
    pub fn new() -> RunConfigBuilder {
        RunConfigBuilder::default()
    }

    pub fn set(&mut self, key: &str, value: &str) {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        self.entries.push((key, value.trim().to_string()));
    }

    /// Flat `key = value` text, one setting per line, `#` comments.
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    lineno + 1
                )));
            };
            self.set(key, value);
        }
        Ok(())
    }

    fn last(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn build(&self) -> Result<RunConfig> {
        let levels: usize = match self.last("levels") {
            Some(v) => parse(v, "levels")?,
            None => 3,
        };
        let mut config = match self.last("preset") {
            Some(name) => RunConfig::from_preset(name, levels)?,
            None => {
                // explicit geometry keys
                let coarse_nx = parse(
                    self.last("coarse_nx").ok_or_else(missing_geometry)?,
                    "coarse_nx",
                )?;
                let coarse_ny = parse(
                    self.last("coarse_ny").ok_or_else(missing_geometry)?,
                    "coarse_ny",
                )?;
                let bc = match self.last("bc").unwrap_or("left_edge") {
                    "left_edge" => FixedBoundary::LeftEdge,
                    "bottom_corners" => FixedBoundary::BottomCorners,
                    other => return Err(Error::InvalidConfig(format!("unknown bc '{other}'"))),
                };
                let load = match self.last("load").unwrap_or("right_middle") {
                    "right_middle" => LoadPoint::RightEdgeMiddle,
                    "bottom_middle" => LoadPoint::BottomEdgeMiddle,
                    other => return Err(Error::InvalidConfig(format!("unknown load '{other}'"))),
                };
                let problem = ProblemSpec {
                    coarse_nx,
                    coarse_ny,
                    levels,
                    bc,
                    load,
                    volume: 0.0,
                    x_upper: 2.0,
                    young: 1.0,
                    poisson: 0.3,
                    model: ModelKind::Vts,
                };
                let volume = match self.last("volume") {
                    Some(v) => parse(v, "volume")?,
                    None => problem.num_finest_elements() as f64,
                };
                RunConfig {
                    preset: None,
                    problem: ProblemSpec { volume, ..problem },
                    solver: SolverChoice::Ipm,
                    linear: LinearSolverKind::MgCg,
                    tau_ip: 1e-8,
                    tau_oc: 1e-5,
                    cg_tol: None,
                    cg_tol_mode: CgTolMode::Fixed,
                    cg_stop_mode: None,
                    x_lower: 1e-9,
                    newton_cap: 50,
                    max_outer: 5000,
                    out_dir: None,
                    seed: 0,
                }
            }
        };
        for (key, value) in &self.entries {
            apply_setting(&mut config, key, value)?;
        }
        config.problem.validate()?;
        if let ModelKind::Simp { penal, r_min, .. } = config.problem.model {
            if penal < 1.0 || r_min <= 0.0 {
                return Err(Error::InvalidConfig(
                    "simp model requires penal >= 1 and r_min > 0".into(),
                ));
            }
        }
        Ok(config)
    }
}

fn missing_geometry() -> Error {
    Error::InvalidConfig("either preset or coarse_nx/coarse_ny must be given".into())
}

fn parse<T: std::str::FromStr>(value: &str, key: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse {key} = '{value}'")))
}

fn apply_setting(config: &mut RunConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "preset" | "levels" | "coarse_nx" | "coarse_ny" | "bc" | "load" => {} // consumed by build
        "solver" => {
            config.solver = match value {
                "ipm" => SolverChoice::Ipm,
                "oc" => SolverChoice::Oc,
                "doc" => SolverChoice::Doc,
                "aoc" => SolverChoice::Aoc,
                other => return Err(Error::InvalidConfig(format!("unknown solver '{other}'"))),
            };
        }
        "linear" => {
            config.linear = match value {
                "mgcg" => LinearSolverKind::MgCg,
                "direct" => LinearSolverKind::Direct,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown linear solver '{other}'"
                    )))
                }
            };
        }
        "model" => match value {
            "vts" => config.problem.model = ModelKind::Vts,
            "simp" => {
                if !matches!(config.problem.model, ModelKind::Simp { .. }) {
                    config.problem.model = ModelKind::Simp {
                        penal: 3.0,
                        r_min: 2.0,
                        metric: DistanceMetric::Manhattan,
                    };
                }
            }
            other => return Err(Error::InvalidConfig(format!("unknown model '{other}'"))),
        },
        "penal" => {
            let p: f64 = parse(value, key)?;
            if let ModelKind::Simp { ref mut penal, .. } = config.problem.model {
                *penal = p;
            } else {
                return Err(Error::InvalidConfig("penal needs model = simp".into()));
            }
        }
        "r_min" => {
            let r: f64 = parse(value, key)?;
            if let ModelKind::Simp { ref mut r_min, .. } = config.problem.model {
                *r_min = r;
            } else {
                return Err(Error::InvalidConfig("r_min needs model = simp".into()));
            }
        }
        "metric" => {
            let m = match value {
                "manhattan" => DistanceMetric::Manhattan,
                "euclidean" => DistanceMetric::Euclidean,
                other => return Err(Error::InvalidConfig(format!("unknown metric '{other}'"))),
            };
            if let ModelKind::Simp { ref mut metric, .. } = config.problem.model {
                *metric = m;
            } else {
                return Err(Error::InvalidConfig("metric needs model = simp".into()));
            }
        }
        "volume" => config.problem.volume = parse(value, key)?,
        "x_upper" => config.problem.x_upper = parse(value, key)?,
        "young" => config.problem.young = parse(value, key)?,
        "poisson" => config.problem.poisson = parse(value, key)?,
        "tau_ip" => config.tau_ip = parse(value, key)?,
        "tau_oc" => config.tau_oc = parse(value, key)?,
        "cg_tol" => config.cg_tol = Some(parse(value, key)?),
        "cg_tol_mode" => {
            config.cg_tol_mode = match value {
                "fixed" => CgTolMode::Fixed,
                "decreasing" => CgTolMode::Decreasing,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown cg_tol_mode '{other}'"
                    )))
                }
            };
        }
        "cg_stop_mode" => {
            config.cg_stop_mode = Some(match value {
                "relative" => StopMode::Relative,
                "product" => StopMode::ProductLiteral,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown cg_stop_mode '{other}'"
                    )))
                }
            });
        }
        "x_lower" => config.x_lower = parse(value, key)?,
        "newton_cap" => config.newton_cap = parse(value, key)?,
        "max_outer" => config.max_outer = parse(value, key)?,
        "out" => config.out_dir = Some(PathBuf::from(value)),
        "seed" => config.seed = parse(value, key)?,
        other => return Err(Error::InvalidConfig(format!("unknown setting '{other}'"))),
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunTotals {
    pub feval: usize,
    pub total_cg_iterations: usize,
    pub avg_cg_per_solve: f64,
    pub solver_wall_seconds: f64,
    pub objective: f64,
    /// smallest density above the reporting floor
    pub x_min: f64,
}

#[derive(Debug)]
pub enum SolverRows {
    Ipm(Vec<IpmIterationRow>),
    Oc(Vec<OcIterationRow>),
}

impl SolverRows {
    pub fn len(&self) -> usize {
        match self {
            SolverRows::Ipm(rows) => rows.len(),
            SolverRows::Oc(rows) => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug)]
pub struct RunLog {
    pub solver: String,
    pub linear: String,
    pub rows: SolverRows,
    pub totals: RunTotals,
    pub outer_iterations: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub log: RunLog,
    /// raw density field on the finest mesh
    pub density: Vec<f64>,
    /// field used for rendering: OC floor entries reported as zero
    pub display_density: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub x_upper: f64,
}

fn linear_name(kind: LinearSolverKind) -> &'static str {
    match kind {
        LinearSolverKind::MgCg => "mgcg",
        LinearSolverKind::Direct => "direct",
    }
}

/// Smallest entry above `floor`; zero if the field is entirely floored.
fn min_above(values: &[f64], floor: f64) -> f64 {
    let min = values
        .iter()
        .copied()
        .filter(|&v| v > floor)
        .fold(f64::INFINITY, f64::min);
    if min.is_finite() {
        min
    } else {
        0.0
    }
}

/// Execute one pipeline. On success writes the artifacts (when an output
/// directory is configured) and returns the in-memory results; on a solver
/// failure a summary carrying the failure reason is still written.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let outcome = execute(config);
    if let (Err(e), Some(dir)) = (&outcome, &config.out_dir) {
        let _ = fs::create_dir_all(dir);
        let _ = fs::write(dir.join("summary.json"), failure_summary(config, e));
    }
    let output = outcome?;
    if let Some(dir) = &config.out_dir {
        write_artifacts(config, &output, dir)?;
    }
    Ok(output)
}

fn execute(config: &RunConfig) -> Result<RunOutput> {
    let mesh = config.problem.finest_mesh();
    let (nx, ny) = (mesh.nx(), mesh.ny());
    match config.solver {
        SolverChoice::Ipm => {
            let solver = IpmSolver::new(config.problem.clone(), config.ipm_config())?;
            let begin = Instant::now();
            let run = solver.solve()?;
            let wall = begin.elapsed().as_secs_f64();
            let x_min = min_above(&run.state.density, 0.0);
            let totals = RunTotals {
                feval: run.feval,
                total_cg_iterations: run.total_cg_iterations,
                avg_cg_per_solve: run.total_cg_iterations as f64 / run.feval as f64,
                solver_wall_seconds: wall,
                objective: run.objective,
                x_min,
            };
            Ok(RunOutput {
                log: RunLog {
                    solver: "ipm".into(),
                    linear: linear_name(config.linear).into(),
                    rows: SolverRows::Ipm(run.rows),
                    totals,
                    outer_iterations: run.outer_iterations,
                    warnings: run.warnings,
                },
                density: run.state.density.clone(),
                display_density: run.state.density,
                nx,
                ny,
                x_upper: config.problem.x_upper,
            })
        }
        _ => {
            let oc_config = config.oc_config();
            let floor = oc_config.x_lower;
            let solver = OcSolver::new(config.problem.clone(), oc_config)?;
            let begin = Instant::now();
            let run = solver.solve()?;
            let wall = begin.elapsed().as_secs_f64();
            let x_min = min_above(&run.density, floor * (1.0 + 1e-9));
            let totals = RunTotals {
                feval: run.feval,
                total_cg_iterations: run.total_cg_iterations,
                avg_cg_per_solve: run.total_cg_iterations as f64 / run.feval as f64,
                solver_wall_seconds: wall,
                objective: run.objective,
                x_min,
            };
            Ok(RunOutput {
                log: RunLog {
                    solver: config.solver.name().into(),
                    linear: linear_name(config.linear).into(),
                    rows: SolverRows::Oc(run.rows),
                    totals,
                    outer_iterations: run.iterations,
                    warnings: run.warnings,
                },
                density: run.density,
                display_density: run.zeroed_density,
                nx,
                ny,
                x_upper: config.problem.x_upper,
            })
        }
    }
}

/// 8-bit binary graymap of the density field, rows top to bottom.
pub fn render_density_pgm(x: &[f64], nx: usize, ny: usize, x_upper: f64) -> Vec<u8> {
    assert_eq!(x.len(), nx * ny);
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    for row in 0..ny {
        let ey = ny - 1 - row;
        for ex in 0..nx {
            let v = (255.0 * x[ex * ny + ey] / x_upper)
                .round()
                .clamp(0.0, 255.0);
            out.push(v as u8);
        }
    }
    out
}

/// Comma-separated raw density values in the same orientation as the image.
pub fn render_density_csv(x: &[f64], nx: usize, ny: usize) -> String {
    assert_eq!(x.len(), nx * ny);
    let mut out = String::new();
    for row in 0..ny {
        let ey = ny - 1 - row;
        let line: Vec<String> = (0..nx).map(|ex| format!("{}", x[ex * ny + ey])).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn log_csv(log: &RunLog) -> String {
    let mut out = String::new();
    match &log.rows {
        SolverRows::Ipm(rows) => {
            out.push_str(
                "outer_iter,s,r,newton_steps,cg_iters,objective,rel_equilibrium,scaled_kkt_error,step_length\n",
            );
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.outer_iter,
                    r.barrier_lower,
                    r.barrier_upper,
                    r.newton_steps,
                    r.cg_iterations,
                    r.objective,
                    r.equilibrium_rel,
                    r.kkt_error,
                    r.step_length
                );
            }
        }
        SolverRows::Oc(rows) => {
            out.push_str("iter,objective,delta_objective,lambda,cg_iters,cg_tol\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
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
    out
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn json_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "null".into()
    }
}

pub fn summary_json(config: &RunConfig, output: &RunOutput) -> String {
    let model = match config.problem.model {
        ModelKind::Vts => "vts",
        ModelKind::Simp { .. } => "simp",
    };
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"status\": \"ok\",");
    let _ = writeln!(s, "  \"solver\": \"{}\",", output.log.solver);
    let _ = writeln!(s, "  \"linear\": \"{}\",", output.log.linear);
    let _ = writeln!(s, "  \"model\": \"{model}\",");
    let _ = writeln!(
        s,
        "  \"preset\": {},",
        match &config.preset {
            Some(p) => format!("\"{}\"", json_escape(p)),
            None => "null".into(),
        }
    );
    let _ = writeln!(s, "  \"levels\": {},", config.problem.levels);
    let _ = writeln!(s, "  \"elements\": {},", output.nx * output.ny);
    let _ = writeln!(
        s,
        "  \"variables\": {},",
        config.problem.finest_free_dof_count()
    );
    let _ = writeln!(s, "  \"volume\": {},", json_f64(config.problem.volume));
    let _ = writeln!(s, "  \"x_upper\": {},", json_f64(config.problem.x_upper));
    let _ = writeln!(s, "  \"tau_ip\": {},", json_f64(config.tau_ip));
    let _ = writeln!(s, "  \"tau_oc\": {},", json_f64(config.tau_oc));
    let _ = writeln!(s, "  \"outer_iters\": {},", output.log.outer_iterations);
    let _ = writeln!(s, "  \"feval\": {},", output.log.totals.feval);
    let _ = writeln!(
        s,
        "  \"total_cg_iters\": {},",
        output.log.totals.total_cg_iterations
    );
    let _ = writeln!(
        s,
        "  \"avg_cg_per_solve\": {},",
        json_f64(output.log.totals.avg_cg_per_solve)
    );
    let _ = writeln!(
        s,
        "  \"objective\": {},",
        json_f64(output.log.totals.objective)
    );
    let _ = writeln!(s, "  \"x_min\": {},", json_f64(output.log.totals.x_min));
    let _ = writeln!(
        s,
        "  \"solver_wall_seconds\": {},",
        json_f64(output.log.totals.solver_wall_seconds)
    );
    let _ = writeln!(s, "  \"seed\": {},", config.seed);
    let warnings: Vec<String> = output
        .log
        .warnings
        .iter()
        .map(|w| format!("\"{}\"", json_escape(w)))
        .collect();
    let _ = writeln!(s, "  \"warnings\": [{}]", warnings.join(", "));
    s.push('}');
    s.push('\n');
    s
}

fn failure_summary(config: &RunConfig, error: &Error) -> String {
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"status\": \"failed\",");
    let _ = writeln!(s, "  \"reason\": \"{}\",", json_escape(&error.to_string()));
    let _ = writeln!(s, "  \"solver\": \"{}\",", config.solver.name());
    let _ = writeln!(s, "  \"linear\": \"{}\",", linear_name(config.linear));
    let _ = writeln!(s, "  \"levels\": {}", config.problem.levels);
    s.push_str("}\n");
    s
}

fn write_artifacts(config: &RunConfig, output: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    fs::write(
        dir.join("density.pgm"),
        render_density_pgm(
            &output.display_density,
            output.nx,
            output.ny,
            output.x_upper,
        ),
    )?;
    fs::write(
        dir.join("density.csv"),
        render_density_csv(&output.display_density, output.nx, output.ny),
    )?;
    fs::write(dir.join("log.csv"), log_csv(&output.log))?;
    fs::write(dir.join("summary.json"), summary_json(config, output))?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ArmSummary {
    pub solver: String,
    pub linear: String,
    pub feval: usize,
    pub total_cg_iterations: usize,
    pub objective: f64,
    pub x_min: f64,
}

#[derive(Debug)]
pub struct CompareReport {
    pub arm_a: ArmSummary,
    pub arm_b: ArmSummary,
    pub density_l2_difference: f64,
    pub density_linf_difference: f64,
}

impl CompareReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<10} {:<8} {:>8} {:>10} {:>14} {:>12}",
            "solver", "linear", "feval", "CG iters", "objective", "x_min"
        );
        for arm in [&self.arm_a, &self.arm_b] {
            let _ = writeln!(
                s,
                "{:<10} {:<8} {:>8} {:>10} {:>14.8} {:>12.3e}",
                arm.solver,
                arm.linear,
                arm.feval,
                arm.total_cg_iterations,
                arm.objective,
                arm.x_min
            );
        }
        let _ = writeln!(
            s,
            "density difference: l2 = {:.6e}, linf = {:.6e}",
            self.density_l2_difference, self.density_linf_difference
        );
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n");
        for (tag, arm) in [("a", &self.arm_a), ("b", &self.arm_b)] {
            let _ = writeln!(s, "  \"{tag}\": {{");
            let _ = writeln!(s, "    \"solver\": \"{}\",", arm.solver);
            let _ = writeln!(s, "    \"linear\": \"{}\",", arm.linear);
            let _ = writeln!(s, "    \"feval\": {},", arm.feval);
            let _ = writeln!(s, "    \"total_cg_iters\": {},", arm.total_cg_iterations);
            let _ = writeln!(s, "    \"objective\": {},", json_f64(arm.objective));
            let _ = writeln!(s, "    \"x_min\": {}", json_f64(arm.x_min));
            let _ = writeln!(s, "  }},");
        }
        let _ = writeln!(
            s,
            "  \"density_l2_difference\": {},",
            json_f64(self.density_l2_difference)
        );
        let _ = writeln!(
            s,
            "  \"density_linf_difference\": {}",
            json_f64(self.density_linf_difference)
        );
        s.push_str("}\n");
        s
    }
}

fn same_problem(a: &ProblemSpec, b: &ProblemSpec) -> bool {
    a.coarse_nx == b.coarse_nx
        && a.coarse_ny == b.coarse_ny
        && a.levels == b.levels
        && a.bc == b.bc
        && a.load == b.load
        && a.volume == b.volume
        && a.x_upper == b.x_upper
        && a.young == b.young
        && a.poisson == b.poisson
        && a.model == b.model
}

/// Run two configurations over the same problem and report the iteration
/// totals plus the l2/linf distances between the final density fields.
pub fn compare(config_a: &RunConfig, config_b: &RunConfig) -> Result<CompareReport> {
    if !same_problem(&config_a.problem, &config_b.problem) {
        return Err(Error::InvalidConfig(
            "compare requires both arms to share the problem".into(),
        ));
    }
    let out_a = run(config_a)?;
    let out_b = run(config_b)?;
    let mut l2 = 0.0f64;
    let mut linf = 0.0f64;
    for (p, q) in out_a.density.iter().zip(&out_b.density) {
        let d = (p - q).abs();
        l2 += d * d;
        linf = linf.max(d);
    }
    let arm = |out: &RunOutput| ArmSummary {
        solver: out.log.solver.clone(),
        linear: out.log.linear.clone(),
        feval: out.log.totals.feval,
        total_cg_iterations: out.log.totals.total_cg_iterations,
        objective: out.log.totals.objective,
        x_min: out.log.totals.x_min,
    };
    Ok(CompareReport {
        arm_a: arm(&out_a),
        arm_b: arm(&out_b),
        density_l2_difference: l2.sqrt(),
        density_linf_difference: linf,
    })
}
