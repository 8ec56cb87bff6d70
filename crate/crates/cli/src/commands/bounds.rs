use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use detlev::comparison_counts;

use crate::error::CliResult;
use crate::{emit, to_json};

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub epsilon: f64,
    /// Power-law decay margin `η = α − 1` of the score profile.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &BoundsArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let report = comparison_counts(args.k, args.epsilon, args.eta)?;
    emit(&to_json(&report)?, args.out.as_deref(), stdout)
}
