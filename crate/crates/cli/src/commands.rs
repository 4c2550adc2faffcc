use std::time::Instant;

use serde_json::json;

use bestsubset::bench::{run_bench, BenchProtocol};
use bestsubset::data::{load_csv, load_groups, load_matrix_csv, load_sparse, load_square_csv, Loaded, ResponseColumn};
use bestsubset::selection::{select, Dataset, SelectionOptions, SelectionReport, Tuning};
use bestsubset::spca::{spca_components, spca_path, CovarianceView, SpcaConfig, SpcaPath};
use bestsubset::{Error, GroupStructure, Result, SplicingConfig};

use crate::args::{BenchArgs, CvArgs, FitArgs, Format, InputArgs, ModelArgs, PathArgs, RunArgs, SpcaArgs};
use crate::report::{self, Report};

/// A finished command: the report plus a one-line human summary.
pub struct Outcome {
    pub report: Report,
    pub summary: String,
    /// Companion CSV and its destination.
    pub extra: Option<(std::path::PathBuf, String)>,
}

struct Input {
    data: Dataset,
    names: Option<Vec<String>>,
}

fn load(input: &InputArgs, model: &ModelArgs) -> Result<Input> {
    let Loaded { x, y, names } = match input.format {
        Format::Csv => {
            let response = input.response.clone().unwrap_or(ResponseColumn::Last);
            load_csv(&input.input, &response, !input.no_header, model.family)?
        }
        Format::Sparse => load_sparse(&input.input, model.family)?,
    };
    let groups = match &model.groups {
        Some(path) => {
            let group_of = load_groups(path)?;
            if group_of.len() != x.p() {
                return Err(Error::Data(format!(
                    "group file {} lists {} columns, data has {}",
                    path.display(),
                    group_of.len(),
                    x.p()
                )));
            }
            GroupStructure::new(group_of, Vec::new())?
        }
        None => GroupStructure::singletons(x.p()),
    }
    .with_always_included(&model.always_include)?;
    Ok(Input {
        data: Dataset::new(x, y, groups)?,
        names,
    })
}

fn options(input: &InputArgs, model: &ModelArgs, run: &RunArgs) -> SelectionOptions {
    SelectionOptions {
        splicing: SplicingConfig {
            k_max: model.k_max,
            tau_const: model.tau_const,
            max_splice_iter: model.max_splice_iter,
            swap_check_budget: model.swap_check_budget,
            lambda: model.lambda,
            seed: run.seed,
            ..SplicingConfig::default()
        },
        normalize: !input.no_normalize,
        screen: model.screen,
        threads: run.threads,
    }
}

fn column_label(names: Option<&[String]>, j: usize) -> String {
    names.and_then(|n| n.get(j)).cloned().unwrap_or_else(|| format!("x{}", j + 1))
}

fn selection_outcome(
    command: &'static str,
    report: &SelectionReport,
    input: &Input,
    run: &RunArgs,
    curve: Option<&std::path::PathBuf>,
    started: Instant,
) -> Outcome {
    let report = if run.no_timing { report.clone().without_timing() } else { report.clone() };
    let mut out = Report::from_selection(command, &report, run.seed);
    if !run.no_timing {
        out.timing_ms = started.elapsed().as_secs_f64() * 1e3;
    }
    let labels: Vec<String> = out
        .selected
        .iter()
        .map(|&j| column_label(input.names.as_deref(), j))
        .collect();
    let summary = format!(
        "{command}: family={} n={} p={} chosen_s={} selected=[{}]",
        report.family,
        report.n,
        report.p,
        report.chosen_s,
        labels.join(", ")
    );
    Outcome {
        report: out,
        summary,
        extra: curve.map(|p| (p.clone(), report::selection_curve(&report))),
    }
}

pub fn fit(args: &FitArgs) -> Result<Outcome> {
    let started = Instant::now();
    let s = match (args.support.support_size, args.support.support_range) {
        (Some(s), _) => s,
        _ => return Err(Error::Usage("fit needs --support-size".into())),
    };
    let input = load(&args.input, &args.model)?;
    let opts = options(&args.input, &args.model, &args.run);
    let report = select(&input.data, &opts, &Tuning::Fixed(s))?;
    Ok(selection_outcome("fit", &report, &input, &args.run, None, started))
}

pub fn path(args: &PathArgs) -> Result<Outcome> {
    let started = Instant::now();
    let input = load(&args.input, &args.model)?;
    let opts = options(&args.input, &args.model, &args.run);
    let tuning = Tuning::Path {
        s_list: args.support.sizes(),
        criterion: args.ic,
        gsection: args.gsection,
    };
    let report = select(&input.data, &opts, &tuning)?;
    Ok(selection_outcome("path", &report, &input, &args.run, args.curve.as_ref(), started))
}

pub fn cv(args: &CvArgs) -> Result<Outcome> {
    let started = Instant::now();
    let input = load(&args.input, &args.model)?;
    let opts = options(&args.input, &args.model, &args.run);
    let tuning = Tuning::Cv {
        s_list: args.support.sizes(),
        folds: args.folds,
        seed: args.run.seed,
    };
    let report = select(&input.data, &opts, &tuning)?;
    Ok(selection_outcome("cv", &report, &input, &args.run, args.curve.as_ref(), started))
}

pub fn spca(args: &SpcaArgs) -> Result<Outcome> {
    let started = Instant::now();
    let (cov, n, names) = if args.covariance {
        let rows = load_square_csv(&args.input, !args.no_header)?;
        (CovarianceView::from_rows(&rows)?, None, None)
    } else {
        let (x, names) = load_matrix_csv(&args.input, !args.no_header)?;
        (CovarianceView::from_data(&x)?, Some(x.n()), names)
    };
    let sizes = args
        .support
        .sizes()
        .ok_or_else(|| Error::Usage("spca needs --support-size or --support-range".into()))?;
    let config = SpcaConfig {
        k_max: args.k_max,
        max_splice_iter: args.max_splice_iter,
    };
    if args.components == 0 {
        return Err(Error::Usage("--components must be at least 1".into()));
    }
    let path = if args.components > 1 {
        let [s] = sizes[..] else {
            return Err(Error::Usage("several components need a single --support-size".into()));
        };
        let loadings = spca_components(&cov, s, args.components, &config)?;
        let ev_curve = loadings.iter().map(|l| l.explained_variance).collect();
        SpcaPath { loadings, ev_curve }
    } else {
        spca_path(&cov, &sizes, &config)?
    };
    let mut out = Report::from_spca(&path, n, cov.p(), args.run.seed);
    if !args.run.no_timing {
        out.timing_ms = started.elapsed().as_secs_f64() * 1e3;
    }
    let labels: Vec<String> = out.selected.iter().map(|&j| column_label(names.as_deref(), j)).collect();
    let summary = format!(
        "spca: p={} s={} explained_variance={} support=[{}]",
        cov.p(),
        out.selected.len(),
        path.ev_curve.last().copied().unwrap_or(0.0),
        labels.join(", ")
    );
    Ok(Outcome {
        extra: args.curve.as_ref().map(|p| (p.clone(), report::spca_curve(&path))),
        report: out,
        summary,
    })
}

pub fn bench(args: &BenchArgs) -> Result<Outcome> {
    let started = Instant::now();
    let input = load(&args.input, &args.model)?;
    if args.support_step == 0 {
        return Err(Error::Usage("--support-step must be positive".into()));
    }
    let s_list = match (args.support.support_size, args.support.support_range) {
        (Some(s), _) => Some(vec![s]),
        (None, Some((lo, hi))) => Some((lo..=hi).step_by(args.support_step).collect()),
        (None, None) => None,
    };
    let tuning = match args.folds {
        Some(folds) => Tuning::Cv {
            s_list,
            folds,
            seed: args.run.seed,
        },
        None => Tuning::Path {
            s_list,
            criterion: args.ic,
            gsection: false,
        },
    };
    let protocol = BenchProtocol {
        test_fraction: args.test_fraction,
        repetitions: args.repetitions,
        seed: args.run.seed,
        tuning,
        options: options(&args.input, &args.model, &args.run),
    };
    let mut table = run_bench(&input.data, &protocol)?;
    if args.run.no_timing {
        table = table.without_timing();
    }
    let data = &input.data;
    let report = Report {
        command: "bench",
        family: Some(data.y.family().name().to_string()),
        n: Some(data.n()),
        p: data.p(),
        selected: Vec::new(),
        coefficients: Vec::new(),
        intercept: serde_json::Value::Null,
        deviance: serde_json::Value::Null,
        ic: serde_json::Value::Null,
        path: json!({
            "metric": table.metric_name,
            "mean_metric": report::real(table.mean_metric()),
            "mean_nnz": table.mean_nnz(),
            "mean_runtime_ms": table.mean_runtime_ms(),
            "test_fraction": args.test_fraction,
            "repetitions": table.rows,
        }),
        chosen_s: None,
        converged: true,
        seed: args.run.seed,
        timing_ms: if args.run.no_timing { 0.0 } else { started.elapsed().as_secs_f64() * 1e3 },
        version: bestsubset::VERSION,
    };
    let summary = format!(
        "bench: {} repetitions, mean {}={:.4}, mean nnz={:.1}",
        table.rows.len(),
        table.metric_name,
        table.mean_metric(),
        table.mean_nnz()
    );
    Ok(Outcome {
        extra: args.table.as_ref().map(|p| (p.clone(), table.to_csv())),
        report,
        summary,
    })
}
