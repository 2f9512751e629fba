//! Command-line entry points.
//!
//! Subcommands:
//! - `fetch-scores`: fill the JSONL score cache from a live endpoint
//! - `run`: repeated-holdout experiment over selected configurations
//! - `mock-run`: end-to-end offline run using the mock provider
//! - `report`: re-render table and figure outputs from saved per-split CSVs

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dataset::{load_dataset, Dataset};
use crate::error::{Error, Result};
use crate::eval::{
    make_splits_with, per_split_csv, AucSource, ExperimentOptions, ExperimentRun, Metric,
    MetricSummary, SplitStrategy,
};
use crate::features::FeatureConfigId;
use crate::forest::ForestParams;
use crate::llm::{
    fetch_scores, fetch_scores_with, Condition, MockClient, ProviderConfig, ScoreStore,
    MOCK_MODEL_ID,
};
use crate::report::{render_figure_data, render_table, sha256_file, RunManifest};

#[derive(Parser)]
#[command(
    name = "confounders",
    version,
    about = "Confounder-likelihood features for breast-cancer classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Query a chat-completions endpoint for condition likelihoods and
    /// cache them as JSON lines.
    FetchScores(FetchArgs),
    /// Train and evaluate random forests over repeated holdout splits.
    Run(RunArgs),
    /// Full offline run: mock scores, all configurations, reports.
    MockRun(MockRunArgs),
    /// Re-render table and figure outputs from saved per-split values.
    Report(ReportArgs),
}

#[derive(Args)]
struct FetchArgs {
    /// Dataset CSV.
    #[arg(long)]
    dataset: PathBuf,
    /// JSONL score cache (created if absent).
    #[arg(long)]
    cache: PathBuf,
    /// Endpoint base URL; requests go to <url>/chat/completions.
    #[arg(long)]
    provider_url: String,
    /// Model identifier sent with each request.
    #[arg(long)]
    model: String,
    /// Environment variable holding the API key.
    #[arg(long, default_value = "OPENAI_API_KEY")]
    api_key_env: String,
    /// Sampling temperature.
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    /// Retries per (patient, condition) pair.
    #[arg(long, default_value_t = 3)]
    max_retries: u32,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
    /// Maximum in-flight requests.
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    /// Conditions to score (default: all four).
    #[arg(long, value_delimiter = ',')]
    conditions: Vec<Condition>,
}

#[derive(Args, Clone)]
struct EvalArgs {
    /// Train/test splits.
    #[arg(long, default_value_t = 20)]
    splits: usize,
    /// Train fraction.
    #[arg(long, default_value_t = 0.8)]
    ratio: f64,
    /// Master seed for splits and forests.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Trees per forest.
    #[arg(long, default_value_t = 100)]
    trees: usize,
    /// Maximum tree depth (unbounded when omitted).
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 2)]
    min_samples_split: usize,
    #[arg(long, default_value_t = 1)]
    min_samples_leaf: usize,
    /// Features tried per split (default floor(sqrt(p))).
    #[arg(long)]
    mtry: Option<usize>,
    /// Stratify splits by class instead of plain random draws.
    #[arg(long)]
    stratify: bool,
    /// AUC score source: binarized predictions (default) or vote fractions.
    #[arg(long, value_parser = parse_auc_source, default_value = "predictions")]
    auc_source: AucSource,
}

fn parse_auc_source(s: &str) -> std::result::Result<AucSource, String> {
    match s {
        "predictions" => Ok(AucSource::HardPredictions),
        "vote-fraction" => Ok(AucSource::VoteFraction),
        other => Err(format!(
            "unknown AUC source {other:?} (use predictions|vote-fraction)"
        )),
    }
}

impl EvalArgs {
    fn forest_params(&self) -> ForestParams {
        ForestParams {
            n_trees: self.trees,
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            min_samples_leaf: self.min_samples_leaf,
            mtry: self.mtry,
            seed: self.seed,
        }
    }

    fn strategy(&self) -> SplitStrategy {
        if self.stratify {
            SplitStrategy::Stratified
        } else {
            SplitStrategy::Random
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Dataset CSV.
    #[arg(long)]
    dataset: PathBuf,
    /// JSONL score cache; required for configurations that use likelihood
    /// features.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Model id whose cached scores to use; defaults to the cache's single
    /// model when unambiguous.
    #[arg(long)]
    model: Option<String>,
    /// Configuration to evaluate, or `all`.
    #[arg(long, value_parser = parse_config_arg, default_value = "all")]
    config: ConfigArg,
    #[command(flatten)]
    eval: EvalArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MockRunArgs {
    /// Dataset CSV.
    #[arg(long)]
    dataset: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Score cache path (default: <out>/mock_scores.jsonl).
    #[arg(long)]
    cache: Option<PathBuf>,
    #[command(flatten)]
    eval: EvalArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding per_split.csv and manifest.json from a prior run.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug)]
enum ConfigArg {
    One(FeatureConfigId),
    All,
}

fn parse_config_arg(s: &str) -> std::result::Result<ConfigArg, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(ConfigArg::All);
    }
    s.parse::<FeatureConfigId>()
        .map(ConfigArg::One)
        .map_err(|e| e.to_string())
}

impl ConfigArg {
    fn expand(self) -> Vec<FeatureConfigId> {
        match self {
            ConfigArg::One(c) => vec![c],
            ConfigArg::All => FeatureConfigId::ALL.to_vec(),
        }
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    let result = match cli.command {
        Command::FetchScores(args) => cmd_fetch(args),
        Command::Run(args) => cmd_run(args),
        Command::MockRun(args) => cmd_mock_run(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn cmd_fetch(args: FetchArgs) -> Result<()> {
    let dataset = load_dataset(&args.dataset)?;
    let conditions = if args.conditions.is_empty() {
        Condition::ALL.to_vec()
    } else {
        args.conditions.clone()
    };
    let provider = ProviderConfig {
        endpoint: args.provider_url,
        model_id: args.model,
        api_key_env: args.api_key_env,
        temperature: args.temperature,
        max_retries: args.max_retries,
        timeout_secs: args.timeout,
        max_concurrent: args.concurrency,
    };
    let mut store = ScoreStore::open(&args.cache)?;
    let report = fetch_scores(&dataset, &conditions, &provider, &mut store)?;
    println!(
        "fetched {} of {} missing scores ({} retries); cache now holds {} entries",
        report.fetched,
        report.requested,
        report.retries,
        store.len()
    );
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let dataset = load_dataset(&args.dataset)?;
    let configs = args.config.expand();
    let needs_scores = configs.iter().any(|c| !c.conditions().is_empty());

    let store = match (&args.cache, needs_scores) {
        (Some(path), _) => ScoreStore::open(path)?,
        (None, false) => ScoreStore::in_memory(),
        (None, true) => {
            return Err(Error::InvalidParam {
                reason: "--cache is required for configurations that use likelihood features"
                    .to_string(),
            })
        }
    };
    let model_id = resolve_model_id(args.model.as_deref(), &store, needs_scores)?;

    execute_and_write(
        &dataset,
        &args.dataset,
        &store,
        &model_id,
        None,
        &configs,
        &args.eval,
        &args.out,
    )
}

fn cmd_mock_run(args: MockRunArgs) -> Result<()> {
    let dataset = load_dataset(&args.dataset)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let cache_path = args
        .cache
        .clone()
        .unwrap_or_else(|| args.out.join("mock_scores.jsonl"));
    let mut store = ScoreStore::open(&cache_path)?;
    fetch_scores_with(&dataset, &Condition::ALL, &MockClient, 0, 1, &mut store)?;

    execute_and_write(
        &dataset,
        &args.dataset,
        &store,
        MOCK_MODEL_ID,
        None,
        &FeatureConfigId::ALL,
        &args.eval,
        &args.out,
    )
}

fn resolve_model_id(
    requested: Option<&str>,
    store: &ScoreStore,
    needs_scores: bool,
) -> Result<String> {
    if let Some(id) = requested {
        return Ok(id.to_string());
    }
    if !needs_scores {
        return Ok("none".to_string());
    }
    let ids = store.model_ids();
    match ids.as_slice() {
        [single] => Ok(single.clone()),
        [] => Err(Error::InvalidParam {
            reason: "cache holds no scores; run fetch-scores first or pass --model".to_string(),
        }),
        many => Err(Error::InvalidParam {
            reason: format!(
                "cache holds scores for several models ({}); pass --model",
                many.join(", ")
            ),
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn execute_and_write(
    dataset: &Dataset,
    dataset_path: &Path,
    store: &ScoreStore,
    model_id: &str,
    provider_endpoint: Option<String>,
    configs: &[FeatureConfigId],
    eval: &EvalArgs,
    out: &Path,
) -> Result<()> {
    let params = eval.forest_params();
    let plan = make_splits_with(
        dataset.len(),
        eval.ratio,
        eval.splits,
        eval.seed,
        &dataset.labels(),
        eval.strategy(),
    )?;
    let options = ExperimentOptions {
        auc_source: eval.auc_source,
    };

    let mut runs: Vec<(FeatureConfigId, ExperimentRun)> = Vec::new();
    for &config in configs {
        let run = crate::eval::run_experiment_full(
            dataset, store, model_id, config, &params, &plan, options,
        )?;
        runs.push((config, run));
    }

    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        created_utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        dataset_path: dataset_path.display().to_string(),
        dataset_sha256: sha256_file(dataset_path)?,
        model_id: model_id.to_string(),
        provider_endpoint,
        forest_params: params,
        master_seed: eval.seed,
        n_splits: eval.splits,
        ratio: eval.ratio,
        stratified: eval.stratify,
        auc_source: eval.auc_source,
        configs: configs.to_vec(),
    };
    write_out(out, "manifest.json", &manifest.to_json_pretty())?;

    let run_refs: Vec<(FeatureConfigId, &ExperimentRun)> =
        runs.iter().map(|(c, r)| (*c, r)).collect();
    write_out(out, "per_split.csv", &per_split_csv(&run_refs))?;

    let summaries: Vec<MetricSummary> = runs.iter().map(|(_, r)| r.summary.clone()).collect();
    render_and_write_reports(out, &summaries)?;

    let table = render_table(&summaries)?;
    print!("{}", table.text);
    Ok(())
}

/// Write table.txt/table.csv, and figure.csv/figure.svg when both the
/// baseline and all-confounders summaries are present.
fn render_and_write_reports(out: &Path, summaries: &[MetricSummary]) -> Result<()> {
    let table = render_table(summaries)?;
    write_out(out, "table.txt", &table.text)?;
    write_out(out, "table.csv", &table.csv)?;

    let baseline = summaries
        .iter()
        .find(|s| s.config == FeatureConfigId::Baseline);
    let candidate = summaries
        .iter()
        .find(|s| s.config == FeatureConfigId::AllConfounders);
    match (baseline, candidate) {
        (Some(b), Some(c)) => {
            let figure = render_figure_data(b, c)?;
            write_out(out, "figure.csv", &figure.csv)?;
            write_out(out, "figure.svg", &figure.svg)?;
            println!(
                "average improvement of {} over {}: {:+.2}%",
                c.config.label(),
                b.config.label(),
                figure.improvement.average
            );
        }
        _ => log::warn!("figure outputs skipped: need both baseline and all-confounders summaries"),
    }
    Ok(())
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| Error::io(&path, e))
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let manifest_path = args.out.join("manifest.json");
    let manifest_json =
        std::fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest = RunManifest::from_json(&manifest_json)?;

    let per_split_path = args.out.join("per_split.csv");
    let summaries = summaries_from_per_split_csv(&per_split_path, &manifest.model_id)?;
    if summaries.is_empty() {
        return Err(Error::EmptyInput {
            what: "per_split.csv",
        });
    }
    render_and_write_reports(&args.out, &summaries)?;
    let table = render_table(&summaries)?;
    print!("{}", table.text);
    Ok(())
}

/// Rebuild per-configuration summaries from a `per_split.csv` written by
/// `run`/`mock-run`.
fn summaries_from_per_split_csv(path: &Path, model_id: &str) -> Result<Vec<MetricSummary>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);

    // (config, metric) -> values in split order
    let mut values: BTreeMap<FeatureConfigId, BTreeMap<usize, [Option<f64>; 5]>> = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        let bad = |what: &str| Error::InvalidParam {
            reason: format!("{}: {what} in row {row:?}", path.display()),
        };
        let split_index: usize = row
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad split_index"))?;
        let config: FeatureConfigId = row.get(1).ok_or_else(|| bad("missing config"))?.parse()?;
        let metric: Metric = row.get(2).ok_or_else(|| bad("missing metric"))?.parse()?;
        let value: f64 = row
            .get(3)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad value"))?;
        values
            .entry(config)
            .or_default()
            .entry(split_index)
            .or_insert([None; 5])[metric.index()] = Some(value);
    }

    let mut summaries = Vec::new();
    for (config, by_split) in values {
        let rows: Vec<[Option<f64>; 5]> = by_split.into_values().collect();
        summaries.push(MetricSummary::from_split_values(config, model_id, &rows)?);
    }
    Ok(summaries)
}
