//! Build prompts, score patients with the offline mock provider, and cache
//! the results as JSON lines.
//!
//! ```bash
//! cargo run -p confounders --example mock_scores
//! ```

use confounders::dataset::load_dataset;
use confounders::llm::{
    build_prompt, fetch_scores_with, Condition, MockClient, ScoreStore, MOCK_MODEL_ID,
};

fn main() -> confounders::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/coimbra.csv");
    let dataset = load_dataset(path)?;
    let patient = &dataset.records()[0];

    println!("=== prompt sent for (patient 0, Type-2 Diabetes) ===");
    println!("{}\n", build_prompt(patient, Condition::Diabetes));

    let cache_dir = tempfile::tempdir().expect("temp dir");
    let cache_path = cache_dir.path().join("mock_scores.jsonl");
    let mut store = ScoreStore::open(&cache_path)?;
    let report = fetch_scores_with(&dataset, &Condition::ALL, &MockClient, 0, 1, &mut store)?;
    println!(
        "scored {} (patient, condition) pairs with {MOCK_MODEL_ID}",
        report.fetched
    );

    println!("\nfirst patient's scores:");
    for condition in Condition::ALL {
        let score = store.get(0, condition, MOCK_MODEL_ID).unwrap();
        println!("  {:<13} {:.3}", condition.to_string(), score.value);
    }

    let cache_text = std::fs::read_to_string(&cache_path).expect("cache readable");
    println!("\nfirst two cache lines ({}):", cache_path.display());
    for line in cache_text.lines().take(2) {
        println!("  {line}");
    }

    // a second pass touches nothing: every pair is already cached
    let second = fetch_scores_with(&dataset, &Condition::ALL, &MockClient, 0, 1, &mut store)?;
    println!(
        "\nsecond fetch requested {} pairs (cache hit)",
        second.requested
    );
    Ok(())
}
