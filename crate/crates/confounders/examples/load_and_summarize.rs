//! Load a clinical CSV, validate it, and print per-feature summaries.
//!
//! ```bash
//! cargo run -p confounders --example load_and_summarize [-- path/to/data.csv]
//! ```

use confounders::dataset::{load_dataset, summarize};

fn main() -> confounders::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/coimbra.csv").to_string()
    });
    let dataset = load_dataset(&path)?;
    println!(
        "loaded {} records from {path} (labels: 1 = healthy, 2 = cancer)\n",
        dataset.len()
    );

    let summary = summarize(&dataset)?;
    println!("{summary}");
    println!("as JSON:\n{}", summary.to_json());
    Ok(())
}
