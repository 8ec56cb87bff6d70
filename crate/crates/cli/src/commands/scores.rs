use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use detlev::leverage::default_top_t;
use detlev::{exact_basis, fit_power_law, leverage_scores, DenseMatrix, PowerLawFit};
use serde::Serialize;

use super::InputArgs;
use crate::error::CliResult;
use crate::io::format_value;
use crate::{emit, to_json, OutputFormat};

#[derive(Debug, Clone, Args)]
pub struct ScoresArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: usize,
    /// Number of leading scores used by the fit; defaults to `min(n, 1000)`.
    #[arg(long)]
    pub top_t: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub out_format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreRow {
    /// 1-based column index.
    pub index: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoresReport {
    pub k: usize,
    pub n: usize,
    pub top_t: usize,
    /// Every column, by descending score then ascending index.
    pub scores: Vec<ScoreRow>,
    pub fit: Option<PowerLawFit>,
    /// Why `fit` is absent, e.g. fewer than two positive scores.
    pub fit_error: Option<String>,
}

pub fn compute(a: &DenseMatrix, k: usize, top_t: Option<usize>) -> CliResult<ScoresReport> {
    let basis = exact_basis(a, k)?;
    let profile = leverage_scores(&basis.z, k)?;
    let top_t = top_t.unwrap_or_else(|| default_top_t(profile.len()));
    let scores = profile
        .order()
        .iter()
        .map(|&i| ScoreRow { index: i + 1, score: profile.scores()[i] })
        .collect();
    let (fit, fit_error) = match fit_power_law(&profile, top_t) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(ScoresReport { k, n: profile.len(), top_t, scores, fit, fit_error })
}

/// `index,score` rows; the fit is not part of the CSV.
pub fn to_csv(report: &ScoresReport) -> String {
    let mut text = String::from("index,score\n");
    for row in &report.scores {
        let _ = writeln!(text, "{},{}", row.index, format_value(row.score));
    }
    text
}

pub fn run(args: &ScoresArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let a = args.input.load()?;
    let report = compute(&a, args.k, args.top_t)?;
    let text = match args.out_format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Csv => {
            match (&report.fit, &report.fit_error) {
                (Some(fit), _) => eprintln!(
                    "fit: alpha={} beta={} r_squared={} top_t={}",
                    fit.alpha, fit.beta, fit.r_squared, fit.fitted_count
                ),
                (None, Some(e)) => eprintln!("fit: unavailable ({e})"),
                (None, None) => {}
            }
            to_csv(&report)
        }
    };
    emit(&text, args.out.as_deref(), stdout)
}
