//! One module per subcommand.

pub mod bounds;
pub mod experiment;
pub mod scores;
pub mod select;
pub mod synth;

use std::path::PathBuf;

use clap::Args;
use detlev::DenseMatrix;

use crate::error::CliResult;
use crate::io::{load_matrix, MatrixFormat, DEFAULT_CELL_BUDGET};

/// A matrix file argument.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Matrix file (MatrixMarket `.mtx`/`.mm` or CSV).
    #[arg(long)]
    pub input: PathBuf,
    /// Overrides the format inferred from the extension.
    #[arg(long, value_enum)]
    pub format: Option<MatrixFormat>,
    /// Largest accepted `rows × cols` after densifying.
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
    pub cell_budget: usize,
}

impl InputArgs {
    pub fn load(&self) -> CliResult<DenseMatrix> {
        load_matrix(&self.input, self.format, self.cell_budget)
    }
}

/// 0-based library indices to the 1-based indices shown to users.
pub(crate) fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}
