//! Sweeps over `(k, sweep point, method)`.
//!
//! Cells are evaluated on a rayon pool and gathered in `(k, point, method)`
//! order. Every random draw comes from a seed derived from the config seed
//! and the cell coordinates, so the report bytes do not depend on the
//! thread count.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use detlev::rng::derive_seed;
use detlev::{
    error_report_with, frequent_directions_basis, lemma1_certificate, leverage_scores,
    rangefinder_basis, select_deterministic, select_pivoted_qr, select_randomized, select_top_c,
    svd, DenseMatrix, ErrorReport, LeverageProfile, ReferenceErrors, SelectionMethod,
    SelectionResult,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{parse_method, BasisArg, ExperimentConfig, InputSource, Norm, Sweep};
use crate::error::{CliError, CliResult};
use crate::io::{load_matrix, MatrixFormat, DEFAULT_CELL_BUDGET};
use crate::synthetic::{build, ProfileArg, SyntheticSource};
use crate::{emit, sibling, to_json, write_file, OutputFormat, REPORT_VERSION};

/// Seed stream of the rangefinder basis, kept apart from cell streams.
const BASIS_STREAM: u64 = u64::MAX;

/// Relative slack when checking that a curve is non-increasing in `c`.
const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// JSON experiment configuration; sweep flags are rejected alongside it.
    #[arg(long, conflicts_with_all = [
        "input", "format", "profile", "m", "n", "alpha", "k", "c", "theta",
        "method", "reps", "seed", "norm", "epsilon", "basis",
    ])]
    pub config: Option<PathBuf>,
    #[arg(long, conflicts_with = "profile")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<MatrixFormat>,
    /// Generate one matrix per k instead of reading `--input`.
    #[arg(long, value_enum)]
    pub profile: Option<ProfileArg>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub c: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub theta: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub method: Vec<SelectionMethod>,
    /// Repetitions of randomized methods.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub norm: Option<Norm>,
    /// Accuracy of the approximate basis.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub out_format: Option<OutputFormat>,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
    pub cell_budget: usize,
}

impl ExperimentArgs {
    pub fn to_config(&self) -> CliResult<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => self.config_from_flags()?,
        };
        if self.out.is_some() {
            config.output_path = self.out.clone();
        }
        if let Some(format) = self.out_format {
            config.output_format = format;
        }
        Ok(config)
    }

    fn config_from_flags(&self) -> CliResult<ExperimentConfig> {
        let missing = |flag: &str| CliError::Usage(format!("--{flag} is required"));
        let input = match (&self.input, self.profile) {
            (Some(path), _) => InputSource::File { path: path.clone(), format: self.format },
            (None, Some(profile)) => InputSource::Synthetic(SyntheticSource {
                m: self.m.ok_or_else(|| missing("m"))?,
                n: self.n.ok_or_else(|| missing("n"))?,
                profile,
                alpha: self.alpha,
            }),
            (None, None) => return Err(CliError::Usage("give --input, --profile or --config".into())),
        };
        let nonempty = |v: &[usize]| (!v.is_empty()).then(|| v.to_vec());
        Ok(ExperimentConfig {
            input,
            k_list: self.k.clone(),
            c_list: nonempty(&self.c),
            theta_list: (!self.theta.is_empty()).then(|| self.theta.clone()),
            methods: if self.method.is_empty() {
                vec![SelectionMethod::DeterministicLeverage]
            } else {
                self.method.clone()
            },
            repetitions: self.reps.unwrap_or(crate::config::DEFAULT_REPETITIONS),
            seed: self.seed.unwrap_or(0),
            norm: self.norm.unwrap_or_default(),
            epsilon: self.epsilon.unwrap_or(crate::config::DEFAULT_BASIS_EPSILON),
            basis: self.basis.unwrap_or_default(),
            output_path: None,
            output_format: OutputFormat::Json,
        })
    }
}

/// One `(k, sweep point, method)` cell. Ratios are `None` when the
/// reference error is zero or the norm was not requested.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub dataset: String,
    pub k: usize,
    /// Requested count, or the count reached at `theta`; `None` if unknown.
    pub c: Option<usize>,
    pub method: SelectionMethod,
    pub theta: Option<f64>,
    /// Best over repetitions for randomized methods.
    pub spectral_ratio: Option<f64>,
    pub frobenius_ratio: Option<f64>,
    pub spectral_abs: Option<f64>,
    pub frobenius_abs: Option<f64>,
    /// Mean over repetitions; randomized methods only.
    pub spectral_ratio_mean: Option<f64>,
    pub frobenius_ratio_mean: Option<f64>,
    /// `σ_k²(V_kᵀS)`; for randomized methods, of the best repetition.
    pub certificate: Option<f64>,
    /// Seed of the reported selection, when one was drawn.
    pub seed: Option<u64>,
    pub repetitions: usize,
    pub error: Option<String>,
}

/// Reference points of one `(k, method, norm)` curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Marker {
    pub k: usize,
    pub method: SelectionMethod,
    pub norm: &'static str,
    pub c_equals_k: usize,
    /// Smallest swept `c` whose ratio is at most 1.
    pub first_c_ratio_at_most_one: Option<usize>,
    /// Non-increasing in `c`; checked for nested selections only.
    pub monotone: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
    pub markers: Vec<Marker>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Point {
    Columns(usize),
    Threshold(f64),
}

impl Point {
    fn seed_part(self) -> u64 {
        match self {
            Self::Columns(c) => c as u64,
            Self::Threshold(theta) => theta.to_bits(),
        }
    }
}

/// Everything a cell needs for one `k`, shared read-only across workers.
struct Context {
    a: DenseMatrix,
    dataset: String,
    k: usize,
    reference: ReferenceErrors,
    v_k: DenseMatrix,
    profile: LeverageProfile,
    approx: Option<Result<(LeverageProfile, Option<u64>), String>>,
    pivots: Option<Result<Vec<usize>, String>>,
}

fn dataset_name(input: &InputSource) -> String {
    match input {
        InputSource::File { path, .. } => path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned()),
        InputSource::Synthetic(source) => source.label(),
    }
}

fn build_context(config: &ExperimentConfig, a: DenseMatrix, k: usize) -> CliResult<Context> {
    let f = svd(&a)?;
    let reference = ReferenceErrors::from_svd(&f, k);
    let v_k = f.v_k(k).ok_or(detlev::Error::RankDeficient { k, rank: f.rank() })?;
    let profile = leverage_scores(&v_k, k)?;
    let approx = config.methods.contains(&SelectionMethod::ApproxBasis).then(|| {
        let artifact = match config.basis {
            BasisArg::FrequentDirections => frequent_directions_basis(&a, k, config.epsilon),
            BasisArg::Rangefinder => {
                rangefinder_basis(&a, k, config.epsilon, derive_seed(config.seed, &[k as u64, BASIS_STREAM]))
            }
        };
        artifact
            .and_then(|b| Ok((leverage_scores(&b.z, k)?, b.seed)))
            .map_err(|e| e.to_string())
    });
    let pivots = config.methods.contains(&SelectionMethod::PivotedQr).then(|| {
        select_pivoted_qr(&a, a.cols()).map(|s| s.indices).map_err(|e| e.to_string())
    });
    Ok(Context { a, dataset: dataset_name(&config.input), k, reference, v_k, profile, approx, pivots })
}

fn by_profile(profile: &LeverageProfile, point: Point) -> detlev::Result<SelectionResult> {
    match point {
        Point::Columns(c) => select_top_c(profile, c),
        Point::Threshold(theta) => select_deterministic(profile, theta),
    }
}

struct Evaluated {
    selection: SelectionResult,
    report: ErrorReport,
    certificate: f64,
}

fn evaluate_selection(ctx: &Context, selection: SelectionResult) -> detlev::Result<Evaluated> {
    let report = error_report_with(&ctx.a, &selection, &ctx.reference)?;
    let certificate = lemma1_certificate(&ctx.v_k, &selection)?;
    Ok(Evaluated { selection, report, certificate })
}

fn empty_row(dataset: &str, k: usize, point: Point, method: SelectionMethod, reps: usize) -> Row {
    let (c, theta) = match point {
        Point::Columns(c) => (Some(c), None),
        Point::Threshold(theta) => (None, Some(theta)),
    };
    Row {
        dataset: dataset.to_string(),
        k,
        c,
        method,
        theta,
        spectral_ratio: None,
        frobenius_ratio: None,
        spectral_abs: None,
        frobenius_abs: None,
        spectral_ratio_mean: None,
        frobenius_ratio_mean: None,
        certificate: None,
        seed: None,
        repetitions: reps,
        error: None,
    }
}

fn mean(values: &[Option<f64>]) -> Option<f64> {
    let present: Option<Vec<f64>> = values.iter().copied().collect();
    present.filter(|v| !v.is_empty()).map(|v| v.iter().sum::<f64>() / v.len() as f64)
}

fn min_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.collect::<Option<Vec<f64>>>()?.into_iter().reduce(f64::min)
}

fn evaluate_cell(
    config: &ExperimentConfig,
    ctx: &Context,
    point: Point,
    method: SelectionMethod,
) -> Row {
    let reps = if method == SelectionMethod::RandomizedLeverage { config.repetitions } else { 1 };
    let mut row = empty_row(&ctx.dataset, ctx.k, point, method, reps);
    if let Err(message) = fill_row(config, ctx, point, method, &mut row) {
        row.error = Some(message);
    }
    if !config.norm.includes_spectral() {
        row.spectral_ratio = None;
        row.spectral_abs = None;
        row.spectral_ratio_mean = None;
    }
    if !config.norm.includes_frobenius() {
        row.frobenius_ratio = None;
        row.frobenius_abs = None;
        row.frobenius_ratio_mean = None;
    }
    row
}

/// Count used by count-based methods: the swept `c`, or the deterministic
/// count at the swept `θ` so that methods are compared at equal size.
fn column_count(ctx: &Context, point: Point) -> detlev::Result<usize> {
    match point {
        Point::Columns(c) => Ok(c),
        Point::Threshold(theta) => select_deterministic(&ctx.profile, theta).map(|s| s.c),
    }
}

fn fill_row(
    config: &ExperimentConfig,
    ctx: &Context,
    point: Point,
    method: SelectionMethod,
    row: &mut Row,
) -> Result<(), String> {
    let text = |e: detlev::Error| e.to_string();
    let single = match method {
        SelectionMethod::DeterministicLeverage => by_profile(&ctx.profile, point).map_err(text)?,
        SelectionMethod::ApproxBasis => {
            let (profile, seed) = ctx.approx.as_ref().expect("approx basis prepared").clone()?;
            let mut s = by_profile(&profile, point).map_err(text)?;
            s.method = SelectionMethod::ApproxBasis;
            s.seed = seed;
            s
        }
        SelectionMethod::PivotedQr => {
            let pivots = ctx.pivots.as_ref().expect("pivots prepared").clone()?;
            let c = column_count(ctx, point).map_err(text)?;
            if c == 0 || c > pivots.len() {
                return Err(detlev::Error::InvalidColumnCount { c, n: pivots.len() }.to_string());
            }
            SelectionResult {
                indices: pivots[..c].to_vec(),
                c,
                mass: None,
                method,
                seed: None,
                theta: None,
            }
        }
        SelectionMethod::RandomizedLeverage => return fill_randomized(config, ctx, point, row),
    };
    row.c = Some(single.c);
    let e = evaluate_selection(ctx, single).map_err(text)?;
    row.spectral_ratio = e.report.spectral_ratio;
    row.frobenius_ratio = e.report.frobenius_ratio;
    row.spectral_abs = Some(e.report.spectral_abs);
    row.frobenius_abs = Some(e.report.frobenius_abs);
    row.certificate = Some(e.certificate);
    row.seed = e.selection.seed;
    Ok(())
}

/// Best-of and mean over repetitions. Each norm's best is its own minimum;
/// certificate and seed belong to the repetition with the smallest error
/// in the primary norm (spectral unless only Frobenius was requested).
fn fill_randomized(config: &ExperimentConfig, ctx: &Context, point: Point, row: &mut Row) -> Result<(), String> {
    let c = column_count(ctx, point).map_err(|e| e.to_string())?;
    row.c = Some(c);
    let method_index = method_index(SelectionMethod::RandomizedLeverage);
    let runs = (0..config.repetitions)
        .map(|rep| {
            let seed = derive_seed(config.seed, &[ctx.k as u64, point.seed_part(), method_index, rep as u64]);
            select_randomized(&ctx.profile, c, seed).and_then(|s| evaluate_selection(ctx, s))
        })
        .collect::<detlev::Result<Vec<Evaluated>>>()
        .map_err(|e| e.to_string())?;

    let primary = |e: &Evaluated| {
        if config.norm.includes_spectral() {
            e.report.spectral_abs
        } else {
            e.report.frobenius_abs
        }
    };
    let best = runs
        .iter()
        .min_by(|x, y| primary(x).total_cmp(&primary(y)))
        .expect("at least one repetition");
    let spectral: Vec<Option<f64>> = runs.iter().map(|e| e.report.spectral_ratio).collect();
    let frobenius: Vec<Option<f64>> = runs.iter().map(|e| e.report.frobenius_ratio).collect();
    row.spectral_ratio = min_of(spectral.iter().copied());
    row.frobenius_ratio = min_of(frobenius.iter().copied());
    row.spectral_abs = runs.iter().map(|e| e.report.spectral_abs).reduce(f64::min);
    row.frobenius_abs = runs.iter().map(|e| e.report.frobenius_abs).reduce(f64::min);
    row.spectral_ratio_mean = mean(&spectral);
    row.frobenius_ratio_mean = mean(&frobenius);
    row.certificate = Some(best.certificate);
    row.seed = best.selection.seed;
    Ok(())
}

fn method_index(method: SelectionMethod) -> u64 {
    SelectionMethod::ALL.iter().position(|&m| m == method).expect("listed method") as u64
}

/// Nested selections: each larger `c` keeps the previous columns.
fn is_nested(method: SelectionMethod) -> bool {
    method != SelectionMethod::RandomizedLeverage
}

fn markers_for(config: &ExperimentConfig, rows: &[Row]) -> Vec<Marker> {
    let mut norms = Vec::new();
    if config.norm.includes_spectral() {
        norms.push(("spectral", (|r: &Row| r.spectral_ratio) as fn(&Row) -> Option<f64>));
    }
    if config.norm.includes_frobenius() {
        norms.push(("frobenius", |r: &Row| r.frobenius_ratio));
    }
    let mut markers = Vec::new();
    for &k in &config.k_list {
        for &method in &config.methods {
            let mut curve: Vec<&Row> = rows
                .iter()
                .filter(|r| r.k == k && r.method == method && r.error.is_none() && r.c.is_some())
                .collect();
            curve.sort_by_key(|r| r.c);
            for &(norm, ratio) in &norms {
                let first = curve
                    .iter()
                    .filter(|r| ratio(r).is_some_and(|x| x <= 1.0))
                    .filter_map(|r| r.c)
                    .min();
                let monotone = is_nested(method).then(|| {
                    let values: Vec<f64> = curve.iter().filter_map(|r| ratio(r)).collect();
                    let scale = values.iter().copied().fold(0.0, f64::max);
                    values.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK * scale)
                });
                markers.push(Marker {
                    k,
                    method,
                    norm,
                    c_equals_k: k,
                    first_c_ratio_at_most_one: first,
                    monotone,
                });
            }
        }
    }
    markers
}

/// Runs the sweep described by `config` on `threads` workers (0 = all).
pub fn execute(config: &ExperimentConfig, threads: usize, cell_budget: usize) -> CliResult<Report> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} worker threads: {e}")))?;
    let file_matrix = match &config.input {
        InputSource::File { path, format } => Some(load_matrix(path, *format, cell_budget)?),
        InputSource::Synthetic(_) => None,
    };
    let points: Vec<Point> = match config.sweep() {
        Sweep::Columns(cs) => cs.iter().map(|&c| Point::Columns(c)).collect(),
        Sweep::Thresholds(ts) => ts.iter().map(|&t| Point::Threshold(t)).collect(),
    };
    let cells: Vec<(Point, SelectionMethod)> = points
        .iter()
        .flat_map(|&p| config.methods.iter().map(move |&m| (p, m)))
        .collect();

    let mut rows = Vec::with_capacity(config.k_list.len() * cells.len());
    for &k in &config.k_list {
        let matrix = match (&file_matrix, &config.input) {
            (Some(a), _) => Ok(a.clone()),
            (None, InputSource::Synthetic(source)) => build(source, k, config.seed).map(|(inst, _)| inst.a),
            (None, InputSource::File { .. }) => unreachable!("file input is loaded above"),
        };
        let context = matrix.and_then(|a| pool.install(|| build_context(config, a, k)));
        match context {
            Ok(ctx) => rows.extend(pool.install(|| {
                cells
                    .par_iter()
                    .map(|&(point, method)| evaluate_cell(config, &ctx, point, method))
                    .collect::<Vec<Row>>()
            })),
            Err(e) => rows.extend(cells.iter().map(|&(point, method)| {
                let reps = if method == SelectionMethod::RandomizedLeverage { config.repetitions } else { 1 };
                let mut row = empty_row(&dataset_name(&config.input), k, point, method, reps);
                row.error = Some(e.to_string());
                row
            })),
        }
    }
    let markers = markers_for(config, &rows);
    Ok(Report { version: REPORT_VERSION, config: config.clone(), rows, markers })
}

fn csv_text<T: Serialize>(records: &[T]) -> CliResult<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for record in records {
        writer.serialize(record).map_err(|e| CliError::Serialize(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))
}

/// Writes `report` as JSON, or as a rows CSV plus `<out>.markers.csv`.
pub fn write_report(report: &Report, out: Option<&Path>, format: OutputFormat, stdout: &mut dyn Write) -> CliResult<()> {
    match format {
        OutputFormat::Json => emit(&to_json(report)?, out, stdout),
        OutputFormat::Csv => {
            let out = out.ok_or_else(|| CliError::Usage("CSV reports need --out".into()))?;
            write_file(out, &csv_text(&report.rows)?)?;
            write_file(&sibling(out, ".markers.csv"), &csv_text(&report.markers)?)
        }
    }
}

pub fn run(args: &ExperimentArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = args.to_config()?;
    let report = execute(&config, args.threads, args.cell_budget)?;
    for m in report.markers.iter().filter(|m| m.monotone == Some(false)) {
        eprintln!("warning: {} curve for k={} ({}) increases with c", m.method, m.k, m.norm);
    }
    write_report(&report, config.output_path.as_deref(), config.output_format, stdout)
}
