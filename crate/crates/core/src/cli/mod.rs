//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for input errors, 2 when an internal
//! invariant fails (a no-collapse run violating its support bound).

mod demo;
mod report;
mod scan;
mod scenario;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::distinguish::{find_distinguishing_basis, perp_hit_test, sample_outcomes, theory_discrimination_with_limit, PERP_LABEL};
use crate::engine::{self, certify_support_bound, compute_fs, Theory, DEFAULT_MAX_JOINT_DIM};
use crate::observer;
use crate::Error;

pub use demo::toy_demo_text;
pub use report::{DiscriminationFile, MatrixRecord, ReportFile, RunRecord};
pub use scan::{format_sig12, rows_to_csv, scan, ScanConfig, ScanObserver, ScanRow};
pub use scenario::{ObserverFile, ScenarioFile};

/// Overrides [`DEFAULT_MAX_JOINT_DIM`].
pub const MAX_DIM_ENV: &str = "EVERETT_LAB_MAX_DIM";

const DEFAULT_ALPHA: f64 = 1e-6;
const DEFAULT_DISCRIMINATION_SAMPLES: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("scenario schema violation: {0}")]
    Schema(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::InvariantViolation(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "everett-lab", version, about = "Finite-observer stream measurement simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write a JSON report.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Sample this many outcomes in the F_S-adapted basis and test them.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Raw samples as CSV (outcome index, label).
        #[arg(long)]
        samples_csv: Option<PathBuf>,
    },
    /// Run both theories through the same test and report whether they separate.
    Discriminate {
        scenario: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the three-qubit worked example.
    ToyDemo,
    /// Rank and distance to the fully mixed state across stream sizes.
    Scan {
        /// toy | recording:<memory qubits> | random:<dim>
        #[arg(long)]
        observer: ScanObserver,
        #[arg(long, default_value_t = 1)]
        n_min: u32,
        #[arg(long)]
        n_max: u32,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        streams: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Size guard from the environment, falling back to the default.
pub fn max_joint_dim() -> Result<usize, CliError> {
    match std::env::var(MAX_DIM_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| CliError::Usage(format!("{MAX_DIM_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_JOINT_DIM),
    }
}

/// Executes a parsed command; `Ok` carries the exit code (0 or 2).
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Run {
            scenario,
            seed,
            samples,
            alpha,
            out: out_path,
            samples_csv,
        } => cmd_run(&scenario, seed, samples, alpha, out_path, samples_csv, out),
        Command::Discriminate {
            scenario,
            samples,
            alpha,
            seed,
            out: out_path,
        } => cmd_discriminate(&scenario, samples, alpha, seed, out_path, out),
        Command::ToyDemo => {
            out.write_all(toy_demo_text()?.as_bytes())?;
            Ok(0)
        }
        Command::Scan {
            observer,
            n_min,
            n_max,
            trials,
            streams,
            seed,
            format,
            out: out_path,
        } => {
            let cfg = ScanConfig {
                observer,
                n_min,
                n_max,
                trials,
                streams,
                seed,
                max_joint_dim: max_joint_dim()?,
            };
            let rows = scan(&cfg)?;
            let text = match format {
                OutputFormat::Csv => rows_to_csv(&rows)?,
                OutputFormat::Json => serde_json::to_string_pretty(&rows)? + "\n",
            };
            emit(&text, out_path.as_deref(), out)?;
            Ok(0)
        }
    }
}

/// Parses `args`, runs, and reports errors on stderr.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_scenario(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ScenarioFile::parse(&text)
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn check_alpha(alpha: f64) -> Result<f64, CliError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {alpha}")))
    }
}

fn cmd_run(
    path: &Path,
    seed: Option<u64>,
    samples: Option<usize>,
    alpha: Option<f64>,
    out_path: Option<PathBuf>,
    samples_csv: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let start = Instant::now();
    let mut file = load_scenario(path)?;
    if let Some(seed) = seed {
        file.seed = seed;
    }
    let sc = file.to_scenario()?;
    let limit = max_joint_dim()?;
    let samples = samples.or(file.samples).unwrap_or(0);
    let alpha = check_alpha(alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA))?;

    let report = match sc.theory {
        Theory::Everett => engine::run_everett_with_limit(&sc, limit)?,
        Theory::Copenhagen => engine::run_copenhagen_with_limit(&sc, limit)?,
    };
    let fs = match sc.joint_dim() {
        Some(d) if d <= limit => Some(compute_fs(&observer::build(&sc.observer, sc.n_qubits)?)?),
        _ => None,
    };
    let certificate = fs.as_ref().map(|fs| certify_support_bound(&report, fs)).transpose()?;

    let mut test = None;
    if samples > 0 {
        let basis = find_distinguishing_basis(&report.rho_s, fs.as_ref())?;
        let outcomes = sample_outcomes(&report.rho_s, &basis, samples, file.seed)?;
        if let Some(csv_path) = &samples_csv {
            let mut w = csv::Writer::from_path(csv_path)?;
            w.write_record(["outcome", "label"])?;
            for &k in &outcomes {
                w.write_record([k.to_string(), basis.labels()[k].clone()])?;
            }
            w.flush()?;
        }
        if basis.labels().iter().any(|l| l == PERP_LABEL) {
            let perp: BTreeSet<String> = [PERP_LABEL.to_string()].into();
            test = Some(perp_hit_test(&outcomes, &basis, &perp, alpha)?);
        }
    }

    let violated = sc.theory == Theory::Everett
        && certificate.as_ref().is_some_and(|c| !(c.bound_holds && c.support_contained));
    let output_path = out_path.or_else(|| file.output_path.as_ref().map(PathBuf::from));
    let doc = ReportFile {
        tool_version: crate::TOOL_VERSION.to_string(),
        wall_time_ms: start.elapsed().as_millis() as u64,
        fs_dim: report.fs_dim,
        perp_expectations: certificate.as_ref().map(|c| c.max_perp_expectation),
        certificate,
        bound_informative: sc.bound_is_informative(),
        test,
        run: RunRecord::from(&report),
        scenario: file,
    };
    emit(&(serde_json::to_string_pretty(&doc)? + "\n"), output_path.as_deref(), out)?;
    if violated {
        eprintln!("error: support bound violated in a no-collapse run");
        return Ok(2);
    }
    Ok(0)
}

fn cmd_discriminate(
    path: &Path,
    samples: Option<usize>,
    alpha: Option<f64>,
    seed: Option<u64>,
    out_path: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let start = Instant::now();
    let mut file = load_scenario(path)?;
    if let Some(seed) = seed {
        file.seed = seed;
    }
    let samples = samples.or(file.samples).unwrap_or(DEFAULT_DISCRIMINATION_SAMPLES);
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let alpha = check_alpha(alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA))?;
    let sc = file.to_scenario()?;
    let d = theory_discrimination_with_limit(&sc, samples, alpha, file.seed, max_joint_dim()?)?;

    for w in &d.warnings {
        writeln!(out, "warning: {w}")?;
    }
    writeln!(out, "dim F_S = {}, dim F_S^perp = {}", d.fs_dim, d.perp_dim)?;
    for (name, t) in [("everett", &d.everett), ("copenhagen", &d.copenhagen)] {
        if let Some(t) = t {
            writeln!(
                out,
                "{name}: perp hits {}/{}, p-value {:.6e}, {}",
                t.perp_hits,
                t.n_samples,
                t.p_value_under_copenhagen,
                match t.decision {
                    crate::distinguish::Decision::CollapseRejected => "collapse rejected",
                    crate::distinguish::Decision::CollapseNotRejected => "collapse not rejected",
                }
            )?;
        }
    }
    writeln!(out, "{}", if d.discriminating() { "DISCRIMINATED" } else { "NOT DISCRIMINATED" })?;

    let output_path = out_path.or_else(|| file.output_path.as_ref().map(PathBuf::from));
    if let Some(p) = output_path {
        let doc = DiscriminationFile::new(file, samples, alpha, sc.seed, &d, start.elapsed().as_millis() as u64);
        emit(&(serde_json::to_string_pretty(&doc)? + "\n"), Some(&p), out)?;
    }
    Ok(0)
}
