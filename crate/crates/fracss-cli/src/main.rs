//! `fracss` — simulate fractional-order plants and controllers from a
//! flat key=value configuration, writing trajectory CSVs plus a JSON
//! metadata sidecar.
//!
//! Subcommands:
//! * `simulate <config>` — run the configured open- or closed-loop
//!   simulation; writes `<out>` (CSV) and `<out>.meta.json`.
//! * `compare <csvA> <csvB>` — column-wise maximum differences between
//!   two trajectory CSVs, plus the history-memory ratio when both
//!   metadata sidecars are present.
//! * `controllability <config>` — print the companion-form matrices,
//!   the controllability matrix `Q_R = [B | A B]`, and its rank.
//!
//! Exit codes: 0 success, 1 configuration/usage error, 2 instability
//! during simulation, 3 I/O failure.

mod config;
mod csv;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use fracss::control::{simulate_closed_loop, Scheme};
use fracss::statespace::{
    controllability, decompose, simulate_cfe, simulate_pse, SimulationResult,
};
use fracss::SampledSignal;

use config::{parse_config, InputKind, RunConfig};

/// CLI-level error carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, bad usage, or bad input data (exit 1).
    Config(String),
    /// Simulation produced non-finite values (exit 2).
    Instability(String),
    /// Filesystem failure (exit 3).
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Instability(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Instability(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl From<fracss::Error> for CliError {
    fn from(e: fracss::Error) -> Self {
        match e {
            fracss::Error::Instability { .. } => CliError::Instability(e.to_string()),
            fracss::Error::Config(msg) => CliError::Config(msg),
            fracss::Error::NonConvergent(msg) => CliError::Config(msg),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fracss",
    version,
    about = "Simulate fractional-order dynamical systems and controllers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulation described by a key=value config file.
    Simulate {
        /// Path to the configuration file.
        config: PathBuf,
    },
    /// Compare two trajectory CSVs column by column.
    Compare {
        /// First trajectory CSV.
        csv_a: PathBuf,
        /// Second trajectory CSV.
        csv_b: PathBuf,
    },
    /// Print the state-space matrices, Q_R, and its rank for a config.
    Controllability {
        /// Path to the configuration file.
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful outputs; anything else is
            // a usage error and belongs to the config exit class.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Simulate { config } => run_simulate(&config),
        Command::Compare { csv_a, csv_b } => run_compare(&csv_a, &csv_b),
        Command::Controllability { config } => run_controllability(&config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

fn run_simulate(path: &Path) -> Result<(), CliError> {
    let cfg = load_config(path)?;
    let input = build_input(&cfg)?;
    let started = Instant::now();
    let result = match (&cfg.controller, cfg.scheme) {
        (Some(ctrl), scheme) => {
            simulate_closed_loop(&cfg.model, ctrl, &input, scheme, cfg.n_steps)?
        }
        (None, Scheme::Pse { memory_samples }) => {
            simulate_pse(&decompose(&cfg.model), &input, memory_samples, cfg.n_steps)?
        }
        (None, Scheme::Cfe) => simulate_cfe(&decompose(&cfg.model), &input, cfg.n_steps)?,
    };
    let wall_time_seconds = started.elapsed().as_secs_f64();
    let csv_text = csv::render(&result);
    fs::write(&cfg.out, csv_text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", cfg.out.display())))?;
    let meta = metadata_json(&cfg, &result, wall_time_seconds)?;
    let meta_path = sidecar_path(&cfg.out);
    fs::write(&meta_path, meta)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", meta_path.display())))?;
    println!(
        "wrote {} ({} rows) and {}",
        cfg.out.display(),
        result.t.len(),
        meta_path.display()
    );
    println!(
        "peak history bytes: {}; wall time: {:.6} s",
        result.memory_bytes_peak, wall_time_seconds
    );
    Ok(())
}

/// Builds the input (open loop) or setpoint (closed loop) signal.
fn build_input(cfg: &RunConfig) -> Result<SampledSignal, CliError> {
    let len = cfg.n_steps + 1;
    let signal = match &cfg.input {
        InputKind::Step => SampledSignal::unit_step(cfg.t_step, len),
        InputKind::Zero => SampledSignal::zeros(cfg.t_step, len),
        InputKind::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Io(format!("cannot read input samples {}: {e}", path.display()))
            })?;
            let mut samples = Vec::new();
            for (idx, raw) in text.lines().enumerate() {
                let body = raw.split('#').next().unwrap_or("").trim();
                if body.is_empty() {
                    continue;
                }
                let v: f64 = body.parse().map_err(|_| {
                    CliError::Config(format!(
                        "input file {} line {}: `{body}` is not a number",
                        path.display(),
                        idx + 1
                    ))
                })?;
                samples.push(v);
            }
            SampledSignal::new(cfg.t_step, samples)
        }
    };
    signal.map_err(CliError::from)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".meta.json");
    PathBuf::from(name)
}

#[derive(Serialize)]
struct Metadata<'a> {
    scheme: &'a str,
    parameters: Parameters,
    memory_bytes_peak: usize,
    wall_time_seconds: f64,
}

#[derive(Serialize)]
struct Parameters {
    a2: f64,
    a1: f64,
    a0: f64,
    alpha: f64,
    beta: f64,
    #[serde(rename = "T")]
    t_step: f64,
    n_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    memory_samples: Option<usize>,
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    controller: Option<ControllerMeta>,
}

#[derive(Serialize)]
struct ControllerMeta {
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "Ti")]
    ti: f64,
    #[serde(rename = "Td")]
    td: f64,
    lambda: f64,
    delta: f64,
}

fn metadata_json(
    cfg: &RunConfig,
    result: &SimulationResult,
    wall_time_seconds: f64,
) -> Result<String, CliError> {
    let (scheme, memory_samples) = match cfg.scheme {
        Scheme::Pse { memory_samples } => ("pse", Some(memory_samples)),
        Scheme::Cfe => ("cfe", None),
    };
    let input = match &cfg.input {
        InputKind::Step => "step".to_string(),
        InputKind::Zero => "zero".to_string(),
        InputKind::File(path) => format!("file:{}", path.display()),
    };
    let controller = cfg.controller.as_ref().map(|c| ControllerMeta {
        k: c.k(),
        ti: c.ti(),
        td: c.td(),
        lambda: c.lambda(),
        delta: c.delta(),
    });
    let meta = Metadata {
        scheme,
        parameters: Parameters {
            a2: cfg.model.a2(),
            a1: cfg.model.a1(),
            a0: cfg.model.a0(),
            alpha: cfg.model.alpha(),
            beta: cfg.model.beta(),
            t_step: cfg.t_step,
            n_steps: cfg.n_steps,
            memory_samples,
            input,
            controller,
        },
        memory_bytes_peak: result.memory_bytes_peak,
        wall_time_seconds,
    };
    let mut text = serde_json::to_string_pretty(&meta)
        .map_err(|e| CliError::Io(format!("cannot serialize metadata: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn run_compare(path_a: &Path, path_b: &Path) -> Result<(), CliError> {
    let a = csv::read(path_a)?;
    let b = csv::read(path_b)?;
    if a.t.len() != b.t.len() {
        return Err(CliError::Config(format!(
            "row count mismatch: {} has {} rows, {} has {}",
            path_a.display(),
            a.t.len(),
            path_b.display(),
            b.t.len()
        )));
    }
    for k in 0..a.t.len() {
        if (a.t[k] - b.t[k]).abs() > 1e-12 * a.t[k].abs().max(1.0) {
            return Err(CliError::Config(format!(
                "time grids differ at row {}: {} vs {}",
                k + 2,
                a.t[k],
                b.t[k]
            )));
        }
    }
    let max_delta = |xs: &[f64], ys: &[f64]| {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| (x - y).abs())
            .fold(0.0f64, f64::max)
    };
    println!("rows compared: {}", a.t.len());
    println!("max |du|  = {}", max_delta(&a.u, &b.u));
    println!("max |dy|  = {}", max_delta(&a.y, &b.y));
    println!("max |dx1| = {}", max_delta(&a.x1, &b.x1));
    println!("max |dx2| = {}", max_delta(&a.x2, &b.x2));
    match (read_memory_bytes(path_a), read_memory_bytes(path_b)) {
        (Some(ma), Some(mb)) if mb > 0 => {
            println!(
                "peak history bytes: A={ma} B={mb} ratio={}",
                ma as f64 / mb as f64
            );
        }
        _ => println!("memory ratio unavailable (missing metadata sidecar)"),
    }
    Ok(())
}

/// Peak history bytes from a CSV's metadata sidecar, if readable.
fn read_memory_bytes(csv_path: &Path) -> Option<u64> {
    let text = fs::read_to_string(sidecar_path(csv_path)).ok()?;
    let value: serde_json::Value = serde_json::from_str(&text).ok()?;
    value.get("memory_bytes_peak")?.as_u64()
}

fn run_controllability(path: &Path) -> Result<(), CliError> {
    let cfg = load_config(path)?;
    let ss = decompose(&cfg.model);
    let report = controllability(&ss, None)?;
    println!("A = {}", format_matrix(&ss.a));
    println!("B = {}", format_vector(&ss.b));
    println!("Q_R = {}", format_matrix(&report.q_r));
    println!("rank = {}", report.rank);
    Ok(())
}

fn format_matrix(m: &[[f64; 2]; 2]) -> String {
    format!("[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
}

fn format_vector(v: &[f64; 2]) -> String {
    format!("[{}, {}]", v[0], v[1])
}
