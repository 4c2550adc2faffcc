use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bestsubset::data::ResponseColumn;
use bestsubset::selection::ScreenSize;
use bestsubset::{Family, IcKind};

/// Best-subset selection for sparse GLMs and sparse PCA.
///
/// Reports are JSON with 0-based column indices. Exit codes: 0 success,
/// 2 usage error, 3 data error, 4 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "bestsubset", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one support size.
    Fit(FitArgs),
    /// Warm-started path tuned by an information criterion.
    Path(PathArgs),
    /// Path tuned by K-fold cross-validation.
    Cv(CvArgs),
    /// Sparse leading principal components.
    Spca(SpcaArgs),
    /// Repeated train/test benchmark.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Comma-separated table; the response is one of the columns.
    Csv,
    /// One sample per line: `label index:value ...` with 1-based indices.
    Sparse,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Data file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Response column: a header name or a 0-based index. Defaults to the
    /// last column. Ignored for sparse input.
    #[arg(long, value_parser = parse_response)]
    pub response: Option<ResponseColumn>,
    /// The CSV has no header row.
    #[arg(long)]
    pub no_header: bool,
    /// Skip centering and scaling of the columns.
    #[arg(long)]
    pub no_normalize: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    /// Group file: one group id per column, one per line.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// Comma-separated 0-based columns forced into every model.
    #[arg(long, value_delimiter = ',')]
    pub always_include: Vec<usize>,
    /// Keep only this many columns by marginal screening (`auto` for
    /// ceil(n / ln n)).
    #[arg(long, value_parser = parse_screen)]
    pub screen: Option<ScreenSize>,
    /// Ridge penalty on the coefficients.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Largest splice swap size (default min(s, 5)).
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub max_splice_iter: usize,
    /// Refit every single exchange at a fixed point when s times the number
    /// of inactive groups is at most this (0 disables).
    #[arg(long, default_value_t = 256)]
    pub swap_check_budget: usize,
    /// Constant in the splice acceptance threshold.
    #[arg(long, default_value_t = 0.01)]
    pub tau_const: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Worker threads (default: all cores).
    #[arg(long, env = "BESTSUBSET_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Zero every wall-clock field so reports compare byte for byte.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
#[group(multiple = false)]
pub struct SupportArgs {
    /// A single support size.
    #[arg(long)]
    pub support_size: Option<usize>,
    /// Inclusive range `lo:hi` of support sizes.
    #[arg(long, value_parser = parse_range)]
    pub support_range: Option<(usize, usize)>,
}

impl SupportArgs {
    pub fn sizes(&self) -> Option<Vec<usize>> {
        match (self.support_size, self.support_range) {
            (Some(s), _) => Some(vec![s]),
            (None, Some((lo, hi))) => Some((lo..=hi).collect()),
            (None, None) => None,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub support: SupportArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PathArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub support: SupportArgs,
    #[arg(long, value_parser = parse_ic, default_value = "gic")]
    pub ic: IcKind,
    /// Golden-section search over the support range instead of a full path.
    #[arg(long)]
    pub gsection: bool,
    /// Tuning-curve CSV (columns s, deviance, ic_or_cvloss).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub support: SupportArgs,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Tuning-curve CSV (columns s, deviance, ic_or_cvloss).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpcaArgs {
    /// Data CSV (all columns are features), or a p x p covariance matrix with
    /// `--covariance`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub no_header: bool,
    /// Read the input as a covariance matrix.
    #[arg(long)]
    pub covariance: bool,
    #[command(flatten)]
    pub support: SupportArgs,
    /// Number of components, each found after deflating the previous ones.
    #[arg(long, default_value_t = 1)]
    pub components: usize,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub max_splice_iter: usize,
    /// Explained-variance curve CSV (columns s, explained_variance).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub support: SupportArgs,
    /// Step between support sizes of `--support-range`.
    #[arg(long, default_value_t = 1)]
    pub support_step: usize,
    #[arg(long, default_value_t = 0.3)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 20)]
    pub repetitions: usize,
    /// Tune by K-fold cross-validation instead of `--ic`.
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long, value_parser = parse_ic, default_value = "gic")]
    pub ic: IcKind,
    /// Per-repetition CSV table (metric, nnz, runtime).
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: bestsubset::Error| e.to_string())
}

fn parse_ic(s: &str) -> Result<IcKind, String> {
    s.parse().map_err(|e: bestsubset::Error| e.to_string())
}

fn parse_response(s: &str) -> Result<ResponseColumn, String> {
    Ok(ResponseColumn::parse(s))
}

fn parse_screen(s: &str) -> Result<ScreenSize, String> {
    if s == "auto" {
        return Ok(ScreenSize::Auto);
    }
    s.parse().map(ScreenSize::Fixed).map_err(|_| format!("expected `auto` or a count, got {s:?}"))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let err = || format!("expected `lo:hi`, got {s:?}");
    let (lo, hi) = s.split_once(':').ok_or_else(err)?;
    let (lo, hi): (usize, usize) = (lo.trim().parse().map_err(|_| err())?, hi.trim().parse().map_err(|_| err())?);
    if lo > hi {
        return Err(format!("range {lo}:{hi} is empty"));
    }
    Ok((lo, hi))
}
