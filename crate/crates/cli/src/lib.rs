//! Command-line front end for `detlev`: matrix ingestion, single-shot
//! scoring and selection, bound tables, synthetic instances and
//! experiment sweeps with machine-readable reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod synthetic;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use error::{CliError, CliResult};

/// Version tag of the JSON report layout.
pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Parser)]
#[command(name = "detlev", version, about = "Deterministic leverage-score column subset selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank-k leverage scores, sorted, with a power-law fit.
    Scores(commands::scores::ScoresArgs),
    /// Select columns with one method and report the certificate.
    Select(commands::select::SelectArgs),
    /// Sweep (k, c, method) and report error ratios and markers.
    Experiment(commands::experiment::ExperimentArgs),
    /// Column-count bounds and comparison counts.
    Bounds(commands::bounds::BoundsArgs),
    /// Generate a matrix with a prescribed leverage profile.
    Synth(commands::synth::SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Runs one parsed invocation; primary output goes to `--out` when given,
/// otherwise to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Scores(args) => commands::scores::run(&args, stdout),
        Command::Select(args) => commands::select::run(&args, stdout),
        Command::Experiment(args) => commands::experiment::run(&args, stdout),
        Command::Bounds(args) => commands::bounds::run(&args, stdout),
        Command::Synth(args) => commands::synth::run(&args, stdout),
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli, stdout)
}

/// Pretty JSON with a trailing newline.
pub(crate) fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Serialize(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes `text` to `path`, or to `stdout` when no path is given.
pub(crate) fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(path) => write_file(path, text),
        None => stdout
            .write_all(text.as_bytes())
            .and_then(|()| stdout.flush())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

pub(crate) fn write_file(path: &Path, text: &str) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| CliError::io(path, e))
}

/// `<path>` with `suffix` appended to the file name, e.g. `run.csv` →
/// `run.csv.markers.csv`.
pub(crate) fn sibling(path: &Path, suffix: &str) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    name.into()
}
