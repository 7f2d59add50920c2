//! Command-line front end: fit, evaluate, compare, simulate, correlate,
//! and agreement, all reading and writing the formats documented in
//! `serpeval::formats`. Reports go to standard output as TSV with numbers
//! printed to six decimal places; identical inputs and flags produce
//! byte-identical output.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use serpeval::analysis::{
    self, agreement, aggregate_raters, correlate, online_metrics, per_query_tau,
    AggregationRule, CorrelationMethod, MetricReport,
};
use serpeval::click_models::{ClickModel, ClickModelParams};
use serpeval::error::Error;
use serpeval::estimation::{fit_dbn, fit_dcm, FitConfig};
use serpeval::formats;
use serpeval::metrics::{MetricKind, MetricSpec};
use serpeval::relevance::{Aspect, GainKind, GainScheme, LabeledSerp, MissingPolicy};
use serpeval::run::join;
use serpeval::simulate::{simulate_sessions, SimConfig};

const DEFAULT_DEPTH: usize = 10;

#[derive(Parser)]
#[command(
    name = "serpeval",
    version,
    about = "Offline search-quality evaluation with multi-aspect relevance and click-model metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit click model parameters from a click log and judgments
    Fit {
        /// Click model to fit: dcm or dbn
        #[arg(long)]
        model: String,
        /// JSON-lines click log
        #[arg(long)]
        clicks: PathBuf,
        /// Judgment pool TSV
        #[arg(long)]
        judgments: PathBuf,
        /// Where to write the fitted parameter file
        #[arg(long)]
        out: PathBuf,
        /// Maximum EM iterations
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        /// Convergence threshold on the mean per-session log-likelihood
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Beta pseudo-count on every fitted probability
        #[arg(long, default_value_t = 1.0)]
        smoothing: f64,
        /// Seed for the EM initialization jitter
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Score a run under one metric
    Evaluate {
        /// Metric: udcm, udcm-s, udbn, udbn-s, dcg, or err
        #[arg(long)]
        metric: String,
        /// Judgment pool TSV
        #[arg(long)]
        judgments: PathBuf,
        /// Run file to score
        #[arg(long)]
        run: PathBuf,
        /// Parameter file (required for the u-metrics)
        #[arg(long)]
        params: Option<PathBuf>,
        /// Evaluation depth
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Gain scheme: exp or linear (default: from the parameter file,
        /// else exp)
        #[arg(long)]
        gain: Option<String>,
        /// Also print one row per query
        #[arg(long)]
        per_query: bool,
    },
    /// Score several runs and compare their per-query score rankings
    Compare {
        /// Metric: udcm, udcm-s, udbn, udbn-s, dcg, or err
        #[arg(long)]
        metric: String,
        /// Judgment pool TSV
        #[arg(long)]
        judgments: PathBuf,
        /// Run files to score
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<PathBuf>,
        /// Parameter file (required for the u-metrics)
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Generate a synthetic click log from model parameters
    Simulate {
        /// Click model to draw from: dcm or dbn
        #[arg(long)]
        model: String,
        /// Parameter file
        #[arg(long)]
        params: PathBuf,
        /// Judgment pool TSV
        #[arg(long)]
        judgments: PathBuf,
        /// Run file providing the pages users see
        #[arg(long)]
        run: PathBuf,
        /// Sessions to draw per query
        #[arg(long)]
        sessions: usize,
        /// Master seed
        #[arg(long)]
        seed: u64,
        /// Where to write the click log
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlate an offline metric with online click metrics
    Correlate {
        /// Metric: udcm, udcm-s, udbn, udbn-s, dcg, or err
        #[arg(long)]
        metric: String,
        /// Judgment pool TSV
        #[arg(long)]
        judgments: PathBuf,
        /// Run file to score
        #[arg(long)]
        run: PathBuf,
        /// JSON-lines click log with the online behaviour
        #[arg(long)]
        clicks: PathBuf,
        /// Correlation method: pearson or kendall
        #[arg(long, default_value = "pearson")]
        method: String,
        /// Parameter file (required for the u-metrics)
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Aggregate multi-rater labels and report agreement
    Agreement {
        /// Rater label TSV: qid, docid, aspect, grade
        #[arg(long)]
        labels: PathBuf,
        /// Aspect to aggregate: topical, perceived, or snippet
        #[arg(long)]
        aspect: String,
        /// Aggregation rule: majority_low or mean_round
        #[arg(long, default_value = "majority_low")]
        rule: String,
    },
}

enum CliError {
    /// Wrong invocation: unknown names, missing flag combinations.
    Usage(String),
    /// Bad or inconsistent data in the input files.
    Data(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn fmt6(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalize negative zero
    format!("{x:.6}")
}

fn load_judgments(path: &Path) -> Result<serpeval::JudgmentStore, CliError> {
    let pool = formats::parse_judgments(path)?;
    if pool.duplicates() > 0 {
        eprintln!(
            "warning: {} judgment row(s) overwrote an earlier row for the same (query, document)",
            pool.duplicates()
        );
    }
    Ok(pool)
}

fn parse_metric(s: &str) -> Result<MetricKind, CliError> {
    match s.parse::<MetricKind>() {
        Ok(MetricKind::UMetricGeneric) => {
            Err(usage("metric 'umetric' is library-only; pick one of udcm, udcm-s, udbn, udbn-s, dcg, err"))
        }
        Ok(kind) => Ok(kind),
        Err(_) => Err(usage(format!(
            "unknown metric '{s}'; expected udcm, udcm-s, udbn, udbn-s, dcg, or err"
        ))),
    }
}

fn parse_model(s: &str) -> Result<ClickModel, CliError> {
    s.parse::<ClickModel>()
        .map_err(|_| usage(format!("unknown model '{s}'; expected dcm or dbn")))
}

fn parse_gain_kind(s: &str) -> Result<GainKind, CliError> {
    match s {
        "exp" => Ok(GainKind::Exponential),
        "linear" => Ok(GainKind::Linear),
        other => Err(usage(format!("unknown gain '{other}'; expected exp or linear"))),
    }
}

/// Loads the parameter file when the metric needs one, enforcing the
/// flag-level contract first.
fn load_params_for(
    kind: MetricKind,
    params: &Option<PathBuf>,
) -> Result<Option<(ClickModelParams, GainScheme)>, CliError> {
    if kind.needs_params() && params.is_none() {
        return Err(usage(format!("metric {kind} requires --params")));
    }
    match params {
        Some(path) => Ok(Some(formats::read_params(path)?)),
        None => Ok(None),
    }
}

/// Gain resolution: an explicit --gain wins, then the parameter file's
/// scheme, then the exponential default.
fn build_spec(
    kind: MetricKind,
    depth: usize,
    gain_flag: &Option<String>,
    file_gain: Option<GainScheme>,
) -> Result<MetricSpec, CliError> {
    let scheme = match gain_flag {
        Some(flag) => {
            let gain_kind = parse_gain_kind(flag)?;
            let max = file_gain.map_or(4, |s| s.max_grade());
            GainScheme::new(gain_kind, max).map_err(|e| CliError::Data(e.to_string()))?
        }
        None => file_gain.unwrap_or_default(),
    };
    let spec = MetricSpec::new(kind)
        .with_gains(scheme, scheme)
        .with_depth(depth)
        .map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

fn cmd_fit(
    model: &str,
    clicks: &Path,
    judgments: &Path,
    out: &Path,
    config: FitConfig,
) -> CliResult {
    let model = parse_model(model)?;
    let pool = load_judgments(judgments)?;
    let sessions = formats::parse_clicks(clicks)?;
    let outcome = match model {
        ClickModel::Dcm => fit_dcm(&sessions, &pool, &config)?,
        ClickModel::Dbn => fit_dbn(&sessions, &pool, &config)?,
    };
    formats::write_params(out, &outcome.params, &GainScheme::exponential())?;
    println!("model\t{model}");
    println!("sessions\t{}", sessions.len());
    println!("iterations\t{}", outcome.iterations);
    println!(
        "mean_log_likelihood\t{}",
        fmt6(*outcome.mean_log_likelihoods.last().expect("non-empty trace"))
    );
    Ok(())
}

fn evaluate_one(
    judgments: &Path,
    run: &Path,
    spec: &MetricSpec,
    params: Option<&ClickModelParams>,
) -> Result<MetricReport, CliError> {
    let pool = load_judgments(judgments)?;
    let ranked = formats::parse_run(run)?;
    Ok(analysis::evaluate_run(
        &ranked,
        &pool,
        spec,
        params,
        MissingPolicy::Zero,
    )?)
}

fn cmd_evaluate(
    metric: &str,
    judgments: &Path,
    run: &Path,
    params: &Option<PathBuf>,
    depth: usize,
    gain: &Option<String>,
    per_query: bool,
) -> CliResult {
    let kind = parse_metric(metric)?;
    let loaded = load_params_for(kind, params)?;
    let (model_params, file_gain) = match loaded {
        Some((p, g)) => (Some(p), Some(g)),
        None => (None, None),
    };
    let spec = build_spec(kind, depth, gain, file_gain)?;
    let report = evaluate_one(judgments, run, &spec, model_params.as_ref())?;
    if per_query {
        for (qid, value) in report.per_query() {
            println!("{qid}\t{}", fmt6(*value));
        }
        println!("ALL\t{}", fmt6(report.aggregate()));
    } else {
        println!("{}", fmt6(report.aggregate()));
    }
    Ok(())
}

fn cmd_compare(
    metric: &str,
    judgments: &Path,
    runs: &[PathBuf],
    params: &Option<PathBuf>,
) -> CliResult {
    let kind = parse_metric(metric)?;
    let loaded = load_params_for(kind, params)?;
    let (model_params, file_gain) = match loaded {
        Some((p, g)) => (Some(p), Some(g)),
        None => (None, None),
    };
    let spec = build_spec(kind, DEFAULT_DEPTH, &None, file_gain)?;
    let mut reports = Vec::with_capacity(runs.len());
    for run in runs {
        reports.push(evaluate_one(judgments, run, &spec, model_params.as_ref())?);
    }
    for report in &reports {
        println!("{}\t{}", report.run_tag(), fmt6(report.aggregate()));
    }
    for i in 0..reports.len() {
        for j in i + 1..reports.len() {
            let tau = per_query_tau(&reports[i], &reports[j])?;
            println!(
                "tau\t{}\t{}\t{}",
                reports[i].run_tag(),
                reports[j].run_tag(),
                fmt6(tau)
            );
        }
    }
    Ok(())
}

fn cmd_simulate(
    model: &str,
    params: &Path,
    judgments: &Path,
    run: &Path,
    sessions_per_query: usize,
    seed: u64,
    out: &Path,
) -> CliResult {
    let model = parse_model(model)?;
    let (model_params, _) = formats::read_params(params)?;
    if model_params.model() != model {
        return Err(usage(format!(
            "--model {model} does not match the {} parameter file",
            model_params.model()
        )));
    }
    let pool = load_judgments(judgments)?;
    let ranked = formats::parse_run(run)?;
    let serps = join(&ranked, &pool, DEFAULT_DEPTH)?
        .into_iter()
        .map(|s| s.imputed(MissingPolicy::Zero))
        .collect::<Result<Vec<LabeledSerp>, Error>>()?;
    let config = SimConfig {
        sessions_per_query,
        seed,
        params: model_params,
    };
    let sessions = simulate_sessions(&serps, &config)?;
    formats::write_clicks_file(out, &sessions)?;
    println!("queries\t{}", serps.len());
    println!("sessions_written\t{}", sessions.len());
    Ok(())
}

fn cmd_correlate(
    metric: &str,
    judgments: &Path,
    run: &Path,
    clicks: &Path,
    method: &str,
    params: &Option<PathBuf>,
) -> CliResult {
    let kind = parse_metric(metric)?;
    let method: CorrelationMethod = method
        .parse()
        .map_err(|_| usage(format!("unknown method '{method}'; expected pearson or kendall")))?;
    let loaded = load_params_for(kind, params)?;
    let (model_params, file_gain) = match loaded {
        Some((p, g)) => (Some(p), Some(g)),
        None => (None, None),
    };
    let spec = build_spec(kind, DEFAULT_DEPTH, &None, file_gain)?;
    let report = evaluate_one(judgments, run, &spec, model_params.as_ref())?;
    let sessions = formats::parse_clicks(clicks)?;
    let online = online_metrics(&sessions);

    type Signal = fn(&analysis::OnlineMetrics) -> Option<f64>;
    let signals: [(&str, Signal); 4] = [
        ("uctr", |m| Some(m.uctr)),
        ("max_rr", |m| m.max_rr),
        ("min_rr", |m| m.min_rr),
        ("mean_rr", |m| m.mean_rr),
    ];
    for (name, extract) in &signals {
        let series: std::collections::BTreeMap<String, f64> = online
            .iter()
            .filter_map(|(qid, m)| extract(m).map(|v| (qid.clone(), v)))
            .collect();
        match correlate(report.per_query(), &series, method) {
            Ok(value) => println!("{name}\t{method}\t{}", fmt6(value)),
            Err(Error::InsufficientData(_)) | Err(Error::Analysis(_)) => {
                println!("{name}\t{method}\tna")
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn cmd_agreement(labels: &Path, aspect: &str, rule: &str) -> CliResult {
    let aspect: Aspect = aspect
        .parse()
        .map_err(|_| usage(format!("unknown aspect '{aspect}'; expected topical, perceived, or snippet")))?;
    let rule: AggregationRule = rule
        .parse()
        .map_err(|_| usage(format!("unknown rule '{rule}'; expected majority_low or mean_round")))?;
    let sets = formats::parse_rater_labels(labels)?;
    let selected: Vec<_> = sets.into_iter().filter(|s| s.aspect == aspect).collect();
    if selected.is_empty() {
        return Err(CliError::Data(format!("no {aspect} labels in the file")));
    }
    for set in &selected {
        let grade = aggregate_raters(set, rule)?;
        println!("{}\t{}\t{}", set.query_id, set.doc_id, grade);
    }
    println!("items\t{}", selected.len());
    match agreement(&selected) {
        Ok(stats) => {
            println!("exact_agreement\t{}", fmt6(stats.exact_agreement));
            println!("fleiss_kappa\t{}", fmt6(stats.fleiss_kappa));
        }
        Err(Error::InsufficientData(_)) => {
            println!("exact_agreement\tna");
            println!("fleiss_kappa\tna");
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match &cli.command {
        Command::Fit {
            model,
            clicks,
            judgments,
            out,
            max_iters,
            tol,
            smoothing,
            seed,
        } => cmd_fit(
            model,
            clicks,
            judgments,
            out,
            FitConfig {
                max_iters: *max_iters,
                tol: *tol,
                smoothing: *smoothing,
                seed: *seed,
                missing: MissingPolicy::Zero,
            },
        ),
        Command::Evaluate {
            metric,
            judgments,
            run,
            params,
            depth,
            gain,
            per_query,
        } => cmd_evaluate(metric, judgments, run, params, *depth, gain, *per_query),
        Command::Compare {
            metric,
            judgments,
            runs,
            params,
        } => cmd_compare(metric, judgments, runs, params),
        Command::Simulate {
            model,
            params,
            judgments,
            run,
            sessions,
            seed,
            out,
        } => cmd_simulate(model, params, judgments, run, *sessions, *seed, out),
        Command::Correlate {
            metric,
            judgments,
            run,
            clicks,
            method,
            params,
        } => cmd_correlate(metric, judgments, run, clicks, method, params),
        Command::Agreement {
            labels,
            aspect,
            rule,
        } => cmd_agreement(labels, aspect, rule),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            // --help and --version land here
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
