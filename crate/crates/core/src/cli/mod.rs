//! The `qslb` command line: `check`, `search` and `model`.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 stationary state
//! (`ΔE = 0`), 3 a bound inequality failed, 4 a search found a violation.

mod format;
mod report;
mod scenario;

use std::ffi::OsString;
use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use format::{sci, to_json};
pub use report::{bound_csv, bound_json, ModelReport, SummaryRow, CSV_COLUMNS};
pub use scenario::{ComplexEntry, Scenario, ScenarioFile};

use crate::bounds::{evaluate_trajectory, uniform_grid, TauCatalog};
use crate::models::{
    collective_spin_model, collective_spin_tilted, gaussian_packet_observables, relaxed_pair,
    relaxed_pair_instance, spin_half_model, GaussianPacketParams, ModelInstance,
};
use crate::quantum::{Observable, QuantumState, UnitsConfig};
use crate::search::{
    first_crossing_time, optimize_collective_tilt, relaxed_crossing_time, search, SearchConfig,
    SearchMode, TimeWindow, Verdict, DEFAULT_GRID_POINTS, DEFAULT_REFINE_TOL, DEFAULT_WINDOW_END,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ZERO_DELTA_E: i32 = 2;
pub const EXIT_BOUND_VIOLATION: i32 = 3;
pub const EXIT_SEARCH_VIOLATION: i32 = 4;

pub const SEED_ENV: &str = "QSLB_SEED";

#[derive(Debug, Parser)]
#[command(name = "qslb", version, about = "Evaluate and stress-test quantum speed-limit bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every bound along a trajectory.
    Check(CheckArgs),
    /// Randomized search for instances beating the strict bounds.
    Search(SearchArgs),
    /// Trajectory and crossing summary for an analytic model.
    Model(ModelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckModel {
    SpinHalf,
    RelaxedPair,
    Nspin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    SpinHalf,
    RelaxedPair,
    Nspin,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Eigenstate,
    Relaxed,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Eigenstate => SearchMode::Eigenstate,
            ModeArg::Relaxed => SearchMode::Relaxed,
        }
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["model", "scenario"]))]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub model: Option<CheckModel>,
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// End of the time grid (physical units); defaults to the scenario value or `τ₂`.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid intervals; the grid has `steps + 1` points.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub out: OutFormat,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub delta_e: f64,
    /// Spin count for `nspin`.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=64))]
    pub dim: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Defaults to `$QSLB_SEED`, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses the rayon default.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value_t = DEFAULT_WINDOW_END)]
    pub window_end: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    #[arg(long, default_value_t = DEFAULT_REFINE_TOL)]
    pub refine_tol: f64,
    /// Also evaluate the collective model with this many spins (repeatable).
    #[arg(long = "candidate-nspin")]
    pub candidate_nspin: Vec<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(value_enum)]
    pub name: ModelName,
    #[arg(long, default_value_t = 1.0)]
    pub delta_e: f64,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Initial tilt for `nspin`; optimized when absent.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 100.0)]
    pub p0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub dp: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub out: OutFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::ZeroDeltaE) { EXIT_ZERO_DELTA_E } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_USAGE, message: e.to_string() }
    }
}

/// Successful report text and the exit code it carries.
struct Outcome {
    text: String,
    destination: Option<PathBuf>,
    code: i32,
    note: Option<String>,
}

/// Parses `args` (program name first) and runs the command. `seed_env` is the
/// value of `QSLB_SEED`, if set.
pub fn run<I, T>(args: I, seed_env: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Check(a) => cmd_check(&a),
        Command::Search(a) => cmd_search(&a, seed_env),
        Command::Model(a) => cmd_model(&a),
    };
    match result.and_then(|o| deliver(o, stdout, stderr)) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn deliver(o: Outcome, stdout: &mut dyn Write, stderr: &mut dyn Write) -> std::result::Result<i32, Failure> {
    match &o.destination {
        Some(path) => std::fs::write(path, o.text.as_bytes())?,
        None => stdout.write_all(o.text.as_bytes())?,
    }
    if let Some(note) = o.note {
        writeln!(stderr, "{note}")?;
    }
    Ok(o.code)
}

fn check_instance(model: CheckModel, delta_e: f64, n: usize) -> Result<ModelInstance> {
    match model {
        CheckModel::SpinHalf => spin_half_model(delta_e),
        CheckModel::RelaxedPair => relaxed_pair_instance(delta_e),
        CheckModel::Nspin => collective_spin_model(n, delta_e),
    }
}

fn cmd_check(a: &CheckArgs) -> std::result::Result<Outcome, Failure> {
    let (h, q, psi, file_units, file_t_max, file_steps) = match (&a.scenario, a.model) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            let s = ScenarioFile::parse(&text)?.into_scenario()?;
            (s.hamiltonian, s.observable, s.state, Some(s.units), Some(s.t_max), Some(s.steps))
        }
        (None, Some(model)) => {
            let m = check_instance(model, a.delta_e, a.n)?;
            (m.hamiltonian, m.observable_q, m.initial_state, None, None, None)
        }
        (None, None) => unreachable!("clap enforces the source group"),
    };
    let units = match a.hbar {
        Some(hbar) => UnitsConfig::new(hbar)?,
        None => file_units.unwrap_or_default(),
    };
    let steps = a.steps.or(file_steps).unwrap_or(400);
    let t_max = match a.t_max.or(file_t_max) {
        Some(t) => t,
        None => {
            let de = crate::quantum::uncertainty(&psi, &h)?;
            if de <= crate::bounds::STATIONARY_DELTA_E {
                return Err(Error::ZeroDeltaE.into());
            }
            TauCatalog::new(de, units)?.tau2
        }
    };
    let grid = uniform_grid(t_max, steps)?;
    let report = evaluate_trajectory(&h, &psi, &q, &grid, units)?;
    let text = match a.out {
        OutFormat::Csv => bound_csv(&report),
        OutFormat::Json => to_json(&bound_json(&report)),
    };
    let (code, note) = match report.first_violation() {
        Some(v) => (EXIT_BOUND_VIOLATION, Some(format!("violation: {} first fails at t = {}", v.law, sci(v.t)))),
        None => (EXIT_OK, None),
    };
    Ok(Outcome { text, destination: a.output.clone(), code, note })
}

fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{SEED_ENV}={v:?} is not a u64"))),
        (None, None) => Ok(0),
    }
}

fn cmd_search(a: &SearchArgs, seed_env: Option<&str>) -> std::result::Result<Outcome, Failure> {
    let mode = SearchMode::from(a.mode);
    let mut config = SearchConfig::new(a.dim as usize, a.trials, resolve_seed(a.seed, seed_env)?);
    config.window = TimeWindow::up_to(a.window_end)?;
    config.grid_points = a.grid_points;
    config.refine_tol = a.refine_tol;
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let report = pool.install(|| -> Result<_> {
        for &n in &a.candidate_nspin {
            let candidate = match mode {
                SearchMode::Eigenstate => collective_spin_model(n, 1.0)?,
                SearchMode::Relaxed => {
                    optimize_collective_tilt(n, 1.0, config.window, config.grid_points, config.refine_tol)?.instance
                }
            };
            config.candidates.push(candidate);
        }
        search(&config, mode)
    })?;
    let echo = report::SearchEcho {
        window_end: config.window.end,
        grid_points: config.grid_points,
        refine_tol: config.refine_tol,
        candidate_labels: config.candidates.iter().map(|c| c.label.clone()).collect(),
    };
    let text = to_json(&report::search_json(&report, &echo));
    let (code, note) = match report.verdict {
        Verdict::NoViolation => (EXIT_OK, None),
        Verdict::Violation { crossing, .. } => (
            EXIT_SEARCH_VIOLATION,
            Some(format!("violation: crossing {} below bound {}", sci(crossing), sci(report.bound_compared))),
        ),
    };
    Ok(Outcome { text, destination: a.out.clone(), code, note })
}

const TRAJECTORY_COLUMNS: [&str; 6] = ["t", "q_mean", "delta_q", "dq", "fidelity", "beta"];

fn spin_trajectory(m: &ModelInstance, t_max: f64, steps: usize, units: UnitsConfig) -> Result<Vec<Vec<f64>>> {
    let grid = uniform_grid(t_max, steps)?;
    let report = evaluate_trajectory(&m.hamiltonian, &m.initial_state, &m.observable_q, &grid, units)?;
    Ok(report.points.iter().map(|p| vec![p.t, p.q_mean, p.delta_q, p.dq, p.fid, p.beta]).collect())
}

fn natural_window(delta_e: f64) -> Result<TimeWindow> {
    TimeWindow::up_to(DEFAULT_WINDOW_END / delta_e)
}

fn absent_crossing() -> Error {
    Error::InvalidArgument("no crossing inside the search window".into())
}

/// Builds the report behind `qslb model <name>`.
pub fn model_report(a: &ModelArgs) -> Result<ModelReport> {
    let units = UnitsConfig::new(a.hbar)?;
    let hbar = units.hbar();
    let de = a.delta_e;
    let (grid_points, tol) = (DEFAULT_GRID_POINTS, DEFAULT_REFINE_TOL);
    let default_t_max = hbar * FRAC_PI_2 / de;
    let mut params = vec![("delta_e".to_owned(), de), ("hbar".to_owned(), hbar)];
    let (columns, rows, summary) = match a.name {
        ModelName::SpinHalf => {
            let m = spin_half_model(de)?;
            let cat = TauCatalog::new(de, units)?;
            let t = first_crossing_time(&m, natural_window(de)?, grid_points, tol)?.ok_or_else(absent_crossing)?;
            let rows = spin_trajectory(&m, a.t_max.unwrap_or(default_t_max), a.steps, units)?;
            let summary = vec![
                SummaryRow::new("first_crossing", hbar * t, Some(cat.tau2)),
                SummaryRow::new("tau1", cat.tau1, None),
                SummaryRow::new("t_orth", cat.t_orth, None),
            ];
            (TRAJECTORY_COLUMNS.to_vec(), rows, summary)
        }
        ModelName::RelaxedPair => {
            let pair = relaxed_pair(de)?;
            let m = relaxed_pair_instance(de)?;
            let cat = TauCatalog::new(de, units)?;
            let t = relaxed_crossing_time(&m, natural_window(de)?, grid_points, tol)?.ok_or_else(absent_crossing)?;
            let rows = spin_trajectory(&m, a.t_max.unwrap_or(default_t_max), a.steps, units)?;
            let summary = vec![
                SummaryRow::new("transit_time", hbar * pair.transit_time, Some(cat.tau3)),
                SummaryRow::new("relaxed_crossing", hbar * t, Some(cat.tau3)),
            ];
            (TRAJECTORY_COLUMNS.to_vec(), rows, summary)
        }
        ModelName::Nspin => {
            params.push(("n".to_owned(), a.n as f64));
            let window = natural_window(de)?;
            let (theta, m) = match a.theta {
                Some(theta) => (theta, collective_spin_tilted(a.n, de, theta)?),
                None => {
                    let opt = optimize_collective_tilt(a.n, de, window, grid_points, tol)?;
                    (opt.theta, opt.instance)
                }
            };
            let t = relaxed_crossing_time(&m, window, grid_points, tol)?.ok_or_else(absent_crossing)?;
            let cat = TauCatalog::new(de, units)?;
            let rn = (a.n as f64).sqrt();
            let rows = spin_trajectory(&m, a.t_max.unwrap_or(default_t_max), a.steps, units)?;
            let summary = vec![
                SummaryRow::new("theta", theta, Some(FRAC_PI_2 - (0.5 / rn).asin())),
                SummaryRow::new("relaxed_crossing", hbar * t, Some(cat.tau4(a.n as u64)?)),
            ];
            (TRAJECTORY_COLUMNS.to_vec(), rows, summary)
        }
        ModelName::Gaussian => {
            params.retain(|(k, _)| k == "hbar");
            params.extend([("p0", a.p0), ("dp", a.dp), ("mass", a.mass), ("x0", a.x0)].map(|(k, v)| (k.to_owned(), v)));
            let p = GaussianPacketParams::new(a.mass, a.p0, a.dp, a.x0, units)?;
            let g = gaussian_packet_observables(&p, 0.0)?;
            let t_max = a.t_max.unwrap_or(2.0 * g.crossing_time_exact);
            let rows = uniform_grid(t_max, a.steps)?
                .into_iter()
                .map(|t| vec![t, p.x_mean(t), p.dx(t)])
                .collect();
            let summary = vec![
                SummaryRow::new("crossing_time", g.crossing_time_exact, Some(g.crossing_time_bound)),
                SummaryRow::new("crossing_ratio", g.crossing_time_exact / g.crossing_time_bound, Some(1.0)),
                SummaryRow::new("de_approx", g.de_approx, Some(g.de_exact)),
                SummaryRow::new("de_ratio", g.de_approx / g.de_exact, Some(1.0)),
            ];
            (vec!["t", "x_mean", "dx"], rows, summary)
        }
    };
    let model = match a.name {
        ModelName::SpinHalf => "spin-half",
        ModelName::RelaxedPair => "relaxed-pair",
        ModelName::Nspin => "nspin",
        ModelName::Gaussian => "gaussian",
    };
    Ok(ModelReport { model: model.to_owned(), params, columns, rows, summary })
}

fn cmd_model(a: &ModelArgs) -> std::result::Result<Outcome, Failure> {
    let report = model_report(a)?;
    let text = match a.out {
        OutFormat::Csv => report.csv(),
        OutFormat::Json => to_json(&report.json()),
    };
    Ok(Outcome { text, destination: a.output.clone(), code: EXIT_OK, note: None })
}

/// Scenario for an arbitrary triple, e.g. to write a file `check` can read.
pub fn scenario_for(
    h: &Observable,
    q: &Observable,
    psi: &QuantumState,
    units: UnitsConfig,
    t_max: f64,
    steps: usize,
) -> ScenarioFile {
    Scenario { hamiltonian: h.clone(), observable: q.clone(), state: psi.clone(), units, t_max, steps }.to_file()
}
