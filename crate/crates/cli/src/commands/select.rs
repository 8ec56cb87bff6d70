use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use detlev::{
    exact_basis, frequent_directions_basis, lemma1_certificate, leverage_scores, rangefinder_basis,
    select_deterministic, select_pivoted_qr, select_randomized, select_top_c, theta_for_epsilon,
    BasisKind, DenseMatrix, SelectionMethod, SelectionResult,
};
use serde::Serialize;

use super::{one_based, InputArgs};
use crate::config::{parse_method, BasisArg, DEFAULT_BASIS_EPSILON};
use crate::error::{CliError, CliResult};
use crate::{emit, to_json};

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_parser = parse_method, default_value = "deterministic-leverage")]
    pub method: SelectionMethod,
    /// Score mass the selection must strictly exceed.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Sets `θ = k − ε`; for `approx-basis` also the basis accuracy.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Column count; required for `randomized-leverage` and `pivoted-qr`.
    #[arg(long)]
    pub c: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub basis: BasisArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectReport {
    pub method: SelectionMethod,
    pub k: usize,
    pub theta: Option<f64>,
    pub c: usize,
    /// 1-based, in selection order.
    pub indices: Vec<usize>,
    pub mass: Option<f64>,
    /// `σ_k²(V_kᵀS)` for the exact `V_k`.
    pub certificate: f64,
    pub seed: Option<u64>,
    pub basis: Option<BasisKind>,
}

/// How the column count of one selection is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Stop {
    Threshold(f64),
    Count(usize),
}

fn usage(message: &str) -> CliError {
    CliError::Usage(message.to_string())
}

fn stop_rule(args: &SelectArgs) -> CliResult<Stop> {
    let theta_from = |eps: f64| theta_for_epsilon(args.k, eps).map(Stop::Threshold);
    match args.method {
        SelectionMethod::DeterministicLeverage => match (args.theta, args.epsilon, args.c) {
            (Some(t), None, None) => Ok(Stop::Threshold(t)),
            (None, Some(e), None) => Ok(theta_from(e)?),
            (None, None, Some(c)) => Ok(Stop::Count(c)),
            _ => Err(usage("deterministic-leverage takes exactly one of --theta, --epsilon, --c")),
        },
        SelectionMethod::ApproxBasis => match (args.theta, args.c) {
            (Some(t), None) => Ok(Stop::Threshold(t)),
            (None, Some(c)) => Ok(Stop::Count(c)),
            (None, None) => Ok(theta_from(args.epsilon.unwrap_or(DEFAULT_BASIS_EPSILON))?),
            (Some(_), Some(_)) => Err(usage("approx-basis takes --theta or --c, not both")),
        },
        SelectionMethod::RandomizedLeverage | SelectionMethod::PivotedQr => {
            if args.theta.is_some() || args.epsilon.is_some() {
                return Err(usage("randomized-leverage and pivoted-qr take --c, not a threshold"));
            }
            args.c.map(Stop::Count).ok_or_else(|| usage("--c is required for this method"))
        }
    }
}

pub fn compute(a: &DenseMatrix, args: &SelectArgs) -> CliResult<SelectReport> {
    let stop = stop_rule(args)?;
    let k = args.k;
    let v_k = exact_basis(a, k)?.z;
    let profile = leverage_scores(&v_k, k)?;
    let by_profile = |profile, stop| -> CliResult<SelectionResult> {
        Ok(match stop {
            Stop::Threshold(theta) => select_deterministic(profile, theta)?,
            Stop::Count(c) => select_top_c(profile, c)?,
        })
    };
    let mut basis = None;
    let selection = match (args.method, stop) {
        (SelectionMethod::DeterministicLeverage, _) => by_profile(&profile, stop)?,
        (SelectionMethod::ApproxBasis, _) => {
            let eps = args.epsilon.unwrap_or(DEFAULT_BASIS_EPSILON);
            let artifact = match args.basis {
                BasisArg::FrequentDirections => frequent_directions_basis(a, k, eps)?,
                BasisArg::Rangefinder => rangefinder_basis(a, k, eps, args.seed)?,
            };
            basis = Some(artifact.kind);
            let mut s = by_profile(&leverage_scores(&artifact.z, k)?, stop)?;
            s.method = SelectionMethod::ApproxBasis;
            s
        }
        (SelectionMethod::RandomizedLeverage, Stop::Count(c)) => select_randomized(&profile, c, args.seed)?,
        (SelectionMethod::PivotedQr, Stop::Count(c)) => select_pivoted_qr(a, c)?,
        (_, Stop::Threshold(_)) => unreachable!("stop_rule gives counts to count-based methods"),
    };
    let certificate = lemma1_certificate(&v_k, &selection)?;
    Ok(SelectReport {
        method: selection.method,
        k,
        theta: selection.theta,
        c: selection.c,
        indices: one_based(&selection.indices),
        mass: selection.mass,
        certificate,
        seed: selection.seed.or((basis == Some(BasisKind::Rangefinder)).then_some(args.seed)),
        basis,
    })
}

pub fn run(args: &SelectArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let a = args.input.load()?;
    let report = compute(&a, args)?;
    emit(&to_json(&report)?, args.out.as_deref(), stdout)
}
