//! The whole pipeline offline: mock scores, all six feature
//! configurations, repeated 80/20 holdout evaluation, rendered table, and
//! improvement over baseline.
//!
//! Equivalent to the `mock-run` subcommand, driven through the library.
//!
//! ```bash
//! cargo run --release -p confounders --example mock_pipeline
//! ```

use confounders::dataset::load_dataset;
use confounders::eval::{make_splits, percent_improvement, run_experiment, Metric, MetricSummary};
use confounders::features::FeatureConfigId;
use confounders::forest::ForestParams;
use confounders::llm::{fetch_scores_with, Condition, MockClient, ScoreStore, MOCK_MODEL_ID};
use confounders::report::render_table;

fn main() -> confounders::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/coimbra.csv");
    let dataset = load_dataset(path)?;

    let mut store = ScoreStore::in_memory();
    fetch_scores_with(&dataset, &Condition::ALL, &MockClient, 0, 1, &mut store)?;

    let params = ForestParams {
        seed: 42,
        ..ForestParams::default()
    };
    let plan = make_splits(dataset.len(), 0.8, 20, 42, &dataset.labels())?;

    let mut summaries: Vec<MetricSummary> = Vec::new();
    for config in FeatureConfigId::ALL {
        let summary = run_experiment(&dataset, &store, MOCK_MODEL_ID, config, &params, &plan)?;
        summaries.push(summary);
    }

    let table = render_table(&summaries)?;
    print!("{}", table.text);

    let baseline = &summaries[0];
    println!();
    for summary in &summaries[1..] {
        let improvement = percent_improvement(summary, baseline)?;
        println!(
            "{:<16} vs baseline: accuracy {:+.2}%, average over 5 metrics {:+.2}%",
            summary.config.label(),
            improvement.for_metric(Metric::Accuracy),
            improvement.average
        );
    }
    println!(
        "\n(mock likelihoods are deterministic functions of the clinical features, so gains \
         here only demonstrate the plumbing; use fetch-scores for real model inference)"
    );
    Ok(())
}
