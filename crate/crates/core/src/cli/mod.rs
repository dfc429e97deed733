//! Command-line front end.
//!
//! Any command accepts `--config <file>` holding `key=value` lines; each
//! line acts like `--key=value` placed before the command-line flags, so
//! explicit flags win.

mod commands;
mod pipeline;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;

pub use pipeline::{compare, vote_table, CompareOutcome, CompareSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "implied-svm", version, about = "Implied posterior probabilities for soft-margin SVMs")]
pub struct Cli {
    /// File of key=value lines supplying defaults for the command's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a two-class 2D Gaussian dataset.
    GenData(GenDataArgs),
    /// Train one class-weighted SVM.
    Train(TrainArgs),
    /// Build the hyperplane grid.
    Grid(GridArgs),
    /// Implied posterior estimates for a test set.
    Estimate(EstimateArgs),
    /// Calibration scores, reliability bins and ROC for estimate columns.
    Calibrate(CalibrateArgs),
    /// End-to-end run: base model, grid, Platt, calibration of all three.
    Compare(CompareArgs),
    /// ROC curves and AUC for score columns.
    Roc(RocArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Tutorial,
    German,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Linear,
    Rbf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleKind {
    None,
    Minmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeKind {
    Exact,
    Balanced,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct GenDataArgs {
    #[arg(long, value_enum, default_value = "tutorial")]
    pub preset: Preset,
    /// Positive-class mean as "x,y".
    #[arg(long, value_parser = parse_list)]
    pub mean_plus: Option<FloatList>,
    /// Positive-class covariance as "a,b,c,d" (row-major).
    #[arg(long, value_parser = parse_list)]
    pub cov_plus: Option<FloatList>,
    #[arg(long, value_parser = parse_list)]
    pub mean_minus: Option<FloatList>,
    #[arg(long, value_parser = parse_list)]
    pub cov_minus: Option<FloatList>,
    #[arg(long)]
    pub n_plus: Option<usize>,
    #[arg(long)]
    pub n_minus: Option<usize>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct DataArgs {
    /// CSV or whitespace-separated data file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Zero-based label column; defaults to a column headed "label", else the last.
    #[arg(long)]
    pub label_column: Option<usize>,
    /// Label token of the positive class.
    #[arg(long, default_value = "1")]
    pub positive_label: String,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelKind>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Sets both class penalties.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub c_plus: Option<f64>,
    #[arg(long)]
    pub c_minus: Option<f64>,
    #[arg(long, value_enum)]
    pub scale: Option<ScaleKind>,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_iter: u64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Use only the first N rows (consecutive split).
    #[arg(long)]
    pub n_train: Option<usize>,
    /// Train with budget-preserving weights (z+, z-) instead of the raw
    /// penalties; presets default to 0.5.
    #[arg(long)]
    pub z_plus: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n_train: Option<usize>,
    /// Number of trained models.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeKind>,
    #[arg(long)]
    pub sequential: bool,
    /// Manifest path; model files go next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct EstimateArgs {
    /// Grid manifest written by `grid`.
    #[arg(long)]
    pub grid: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Use only rows after the first N (consecutive split).
    #[arg(long)]
    pub skip: Option<usize>,
    #[arg(long, default_value_t = crate::kernel_svm::DEFAULT_EPS_ON_PLANE)]
    pub eps: f64,
    /// Print the per-level classification table.
    #[arg(long)]
    pub table: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct CalibrateArgs {
    /// CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Columns to evaluate; default is every column except id and label.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    /// Columns to min-max normalize before evaluation (raw scores).
    #[arg(long, value_delimiter = ',')]
    pub normalize: Vec<String>,
    #[arg(long, default_value = "label")]
    pub label: String,
    #[arg(long, default_value_t = crate::calibrate::DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Separate test file; otherwise `--data` is split after `--n-train` rows.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeKind>,
    #[arg(long, default_value_t = crate::calibrate::DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long, default_value_t = crate::kernel_svm::DEFAULT_EPS_ON_PLANE)]
    pub eps: f64,
    /// Seed for generated tutorial data.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct RocArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    #[arg(long, default_value = "label")]
    pub label: String,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
}

/// Comma-separated numbers given as a single flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

fn parse_list(s: &str) -> Result<FloatList, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(FloatList)
}

/// Inserts `--key=value` tokens from the config file directly after the
/// subcommand name so that later command-line flags override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut config = None;
    let mut command_at = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            config = args.get(i + 1).cloned();
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.into());
        } else if command_at.is_none() && !a.starts_with('-') {
            command_at = Some(i);
        }
        i += 1;
    }
    let (Some(path), Some(at)) = (config, command_at) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path:?}: {e}"))?;
    let mut injected = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path:?} line {}: expected key=value", n + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        match value.trim() {
            "true" => injected.push(OsString::from(format!("--{key}"))),
            "false" => {}
            v => injected.push(OsString::from(format!("--{key}={v}"))),
        }
    }
    let mut out = args[..=at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        Error::GridLevel { source, .. } => exit_code(source),
        Error::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match commands::execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            exit_code(&e)
        }
    }
}
