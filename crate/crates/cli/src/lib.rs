//! The `svmd` command: generate benchmark signals, decompose CSV input and
//! regenerate the benchmark tables.

pub mod bench;
pub mod csv;
pub mod decompose;
pub mod plot;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input.
    #[error("{0}")]
    Input(String),
    /// A benchmark finished but missed an acceptance band.
    #[error("{0}")]
    Band(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Band(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "svmd", version, about = "Sequential variational mode decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a benchmark mixture as "t,value" rows.
    #[command(alias = "gen-signal")]
    Gen(GenArgs),
    /// Decompose a CSV signal into modes.
    Decompose(DecomposeArgs),
    /// Regenerate a benchmark table and check it against its bands.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    /// Benchmark signal, 1 to 4.
    pub signal: u8,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the true modes as "t,mode_1,...,mode_k" to this file.
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Svmd,
    Vmd,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecomposeArgs {
    /// Input CSV, or "-" for standard input.
    pub input: PathBuf,
    /// Sample rate for single-column input (Hz).
    #[arg(long)]
    pub rate: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "svmd-out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Svmd)]
    pub method: Method,
    /// Mode bandwidth penalty (1/Hz²). Defaults to the method's own default.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Residual bandwidth penalty (1/Hz²).
    #[arg(long)]
    pub beta: Option<f64>,
    /// First-cycle stop on residual power, as a fraction of input power.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Inner stop on the relative update norm.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, overrides_with = "no_elongate")]
    pub elongate: bool,
    /// Decompose the record without end elongation.
    #[arg(long, overrides_with = "elongate")]
    pub no_elongate: bool,
    #[arg(long, overrides_with = "no_refine")]
    pub refine: bool,
    /// Skip the second cycle on the residual.
    #[arg(long, overrides_with = "refine")]
    pub no_refine: bool,
    /// Second-cycle penalties and stop.
    #[arg(long)]
    pub alpha_refine: Option<f64>,
    #[arg(long)]
    pub beta_refine: Option<f64>,
    #[arg(long)]
    pub eps_refine: Option<f64>,
    /// Number of modes for VMD.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// True modes as "t,mode_1,...,mode_k"; adds metrics to the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Also write plot.svg.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Convergence,
    Noise,
    Refine,
    Compare,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    /// Benchmark signal. Defaults to 1, or 2 for compare.
    #[arg(long)]
    pub signal: Option<u8>,
    /// Noise level for refine and compare.
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    /// Number of seeds, starting at 0. Defaults to 5, or 10 for compare.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Write the table and summary here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli, argv: &[String]) -> Result<()> {
    match cli.command {
        Command::Gen(a) => {
            let text = cmd_gen(&a)?;
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
        Command::Decompose(a) => decompose::cmd_decompose(&a, argv).map(|_| ()),
        Command::Bench(a) => bench::cmd_bench(&a),
    }
}

/// Mixture CSV for `gen`. Writes the truth file as a side effect if asked.
pub fn cmd_gen(a: &GenArgs) -> Result<String> {
    let b = signals_bench::gen_signal(a.signal, a.sigma, a.seed).map_err(input_err)?;
    if let Some(path) = &a.truth_out {
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=b.true_modes.len()).map(|i| format!("mode_{i}")))
            .collect();
        let cols: Vec<&[f64]> = b.true_modes.iter().map(|m| m.samples.as_slice()).collect();
        std::fs::write(path, csv::write_columns(&header, &b.mixture.times(), &cols))?;
    }
    Ok(csv::write_signal(&b.mixture))
}
