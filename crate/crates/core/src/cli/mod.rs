//! Command-line front end: argument parsing, configuration, report emission.

mod commands;
mod config;
mod parse;

pub use config::{load_config, read_epsilon_file, ConfigError, EpsilonMode, RunConfig};
pub use parse::{parse_complex, parse_function, FunctionSpec};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, failed preconditions or invalid configuration (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Failures during a run on valid input (exit 1).
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ternlab", version, about = "Ternary square systems, subharmonic majorants and entire-function diagnostics")]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the report field layout of the subcommand and exit.
    #[arg(long, global = true)]
    pub schema: bool,
    /// Gap sequence: geometric, thm1b or file:PATH.
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Majorant parameter B.
    #[arg(long = "B", global = true)]
    pub b: Option<f64>,
    /// Grid cells per side.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gap sequence, side lengths and corridor widths.
    System(SystemArgs),
    /// Sample u_n on a square.
    EvalU(EvalUArgs),
    /// Check the gluing properties of u_n on a grid.
    VerifySh(VerifyShArgs),
    /// Growth certificate for a sampled subharmonic field.
    Certify(CertifyArgs),
    /// Build the entire functions G_n by the dbar pipeline.
    BuildG(BuildGArgs),
    /// Krylov-Bogolyubov fractions and tails over translates.
    Measure(MeasureArgs),
    /// Ahlfors-Shimizu characteristic profile.
    Nevanlinna(NevanlinnaArgs),
    /// Recurrence coverage of a spherical disk.
    Recur(RecurArgs),
    /// Disk means of (log+ u_n)^(1+eps).
    Loglog(LoglogArgs),
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// CSV table `n,epsilon,a,d`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SquareChoice {
    Sn,
    Custom,
}

#[derive(Debug, Args)]
pub struct EvalUArgs {
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, value_enum, default_value_t = SquareChoice::Sn)]
    pub square: SquareChoice,
    /// Center `x,y` of a custom square.
    #[arg(long)]
    pub center: Option<String>,
    /// Half side of a custom square.
    #[arg(long)]
    pub half_side: Option<f64>,
    /// Write `x,y,log_value` instead of `x,y,value`.
    #[arg(long)]
    pub log_domain: bool,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also evaluate at this point `x,y`.
    #[arg(long)]
    pub at: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyShArgs {
    #[arg(long, default_value_t = 1)]
    pub level: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CertifyMode {
    Adi,
    Levsasha,
    Both,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Field CSV `x,y,value` or `x,y,log_value`; defaults to max(0, Re cos 2πz) on [-8,8]^2.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Disk radius in unit squares.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, value_enum, default_value_t = CertifyMode::Both)]
    pub mode: CertifyMode,
    /// Values at or below this count as zeros of the field.
    #[arg(long, default_value_t = 0.0)]
    pub zero_tol: f64,
    /// Relative tolerance for the per-step maximum comparison.
    #[arg(long, default_value_t = 1e-3)]
    pub rel_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuildMode {
    Cauchy,
    Refine,
}

#[derive(Debug, Args)]
pub struct BuildGArgs {
    #[arg(long, value_enum, default_value_t = BuildMode::Refine)]
    pub mode: BuildMode,
    /// Polynomial degree of the weighted projection.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Directory for `G_<n>.csv` grids (`x,y,re,im`).
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// id, exp, sin, builtin:NAME or G:PATH.
    #[arg(long, default_value = "id")]
    pub function: String,
    /// Level of the averaging square S_n.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Comma-separated tail thresholds.
    #[arg(long)]
    pub thresholds: Option<String>,
    /// Highest ladder level (defaults to n - 1).
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Copy level for the tail bounds (defaults to the majorant ladder).
    #[arg(long)]
    pub tail_level: Option<usize>,
    /// Oscillation level for the second Krylov-Bogolyubov condition.
    #[arg(long, default_value_t = 1.0)]
    pub osc: f64,
}

#[derive(Debug, Args)]
pub struct NevanlinnaArgs {
    /// id, exp, sin, wp[:P1,P2] or G:PATH.
    #[arg(long, default_value = "id")]
    pub function: String,
    #[arg(long = "Rmax", default_value_t = 4.0)]
    pub r_max: f64,
    /// CSV `r,a_r,T`.
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub intervals: usize,
    #[arg(long, default_value_t = 6)]
    pub radial_order: usize,
    #[arg(long, default_value_t = 256)]
    pub angular: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Lattice truncation radius for wp.
    #[arg(long, default_value_t = 20.0)]
    pub lattice_cutoff: f64,
    /// Compare T with log M at R = Rmax/2 and R1 = Rmax (entire functions only).
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Args)]
pub struct RecurArgs {
    #[arg(long, default_value = "sin")]
    pub function: String,
    /// Center `x,y` of the disk D.
    #[arg(long, default_value = "0,0")]
    pub d_center: String,
    #[arg(long, default_value_t = 1.0)]
    pub d_radius: f64,
    /// Translation `x,y`.
    #[arg(long, default_value = "6.283185307179586,0")]
    pub w: String,
    /// Center `x,y` of the spherical disk.
    #[arg(long, default_value = "0,0")]
    pub target_center: String,
    /// Chordal radius of the spherical disk.
    #[arg(long, default_value_t = 0.1)]
    pub target_radius: f64,
    #[arg(long, default_value_t = 40.0)]
    pub lattice_cutoff: f64,
}

#[derive(Debug, Args)]
pub struct LoglogArgs {
    /// Level of u_n (defaults to depth).
    #[arg(long)]
    pub level: Option<usize>,
    /// Comma-separated radii (defaults to a_1..a_level).
    #[arg(long)]
    pub radii: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::System(_) => "system",
            Command::EvalU(_) => "eval-u",
            Command::VerifySh(_) => "verify-sh",
            Command::Certify(_) => "certify",
            Command::BuildG(_) => "build-g",
            Command::Measure(_) => "measure",
            Command::Nevanlinna(_) => "nevanlinna",
            Command::Recur(_) => "recur",
            Command::Loglog(_) => "loglog",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub grid: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub version: &'static str,
}

/// Versioned JSON report emitted by every subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub subcommand: String,
    pub inputs: Value,
    pub results: Value,
    pub provenance: Provenance,
}

/// What a subcommand hands back to [`run`].
pub(crate) struct Outcome {
    pub inputs: Value,
    pub results: Value,
    pub tolerances: BTreeMap<String, f64>,
}

/// Merge the config file with the flags; flags win.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(eps) = &cli.epsilon {
        match eps.as_str() {
            "geometric" => cfg.epsilon_mode = EpsilonMode::Geometric,
            "thm1b" => cfg.epsilon_mode = EpsilonMode::Thm1b,
            other => match other.strip_prefix("file:") {
                Some(path) => {
                    cfg.epsilon_mode = EpsilonMode::File;
                    cfg.epsilon_path = Some(PathBuf::from(path));
                }
                None => {
                    return Err(CliError::Usage(format!(
                        "--epsilon must be geometric, thm1b or file:PATH, got `{other}`"
                    )))
                }
            },
        }
    }
    if let Some(d) = cli.depth {
        cfg.depth = d;
    }
    if let Some(b) = cli.b {
        cfg.b = b;
    }
    if let Some(g) = cli.grid {
        cfg.grid_n = g;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parse `args` (including the program name), run the subcommand and write
/// the report. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let name = cli.command.name();
    if cli.schema {
        let text = serde_json::to_string_pretty(&commands::schema(name)).expect("schema serializes");
        return emit(cli, stdout, &text);
    }
    let cfg = effective_config(cli)?;
    let outcome = commands::dispatch(&cli.command, &cfg)?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        subcommand: name.to_string(),
        inputs: outcome.inputs,
        results: outcome.results,
        provenance: Provenance {
            seed: cfg.seed,
            grid: cfg.grid_n,
            tolerances: outcome.tolerances,
            version: env!("CARGO_PKG_VERSION"),
        },
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Internal(e.to_string()))?;
    emit(cli, stdout, &text)
}

fn emit(cli: &Cli, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Internal(format!("writing report: {e}"));
    match &cli.out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(io),
        None => writeln!(stdout, "{text}").map_err(io),
    }
}
