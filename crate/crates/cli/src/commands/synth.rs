use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use crate::error::CliResult;
use crate::io::{write_matrix, MatrixFormat};
use crate::synthetic::{build, ProfileArg, SyntheticSource};
use crate::{sibling, to_json, write_file};

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum)]
    pub profile: ProfileArg,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Matrix destination; the profile goes to `<out>.profile.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the format inferred from the extension of `--out`.
    #[arg(long, value_enum)]
    pub format: Option<MatrixFormat>,
}

pub fn run(args: &SynthArgs, _stdout: &mut dyn Write) -> CliResult<()> {
    let source = SyntheticSource { m: args.m, n: args.n, profile: args.profile, alpha: args.alpha };
    let (instance, sidecar) = build(&source, args.k, args.seed)?;
    let format = args.format.unwrap_or_else(|| MatrixFormat::from_path(&args.out));
    write_matrix(&args.out, &instance.a, format)?;
    write_file(&sibling(&args.out, ".profile.json"), &to_json(&sidecar)?)
}
