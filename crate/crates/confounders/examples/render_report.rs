//! Render the report outputs from per-split metric values: a text table,
//! long-format CSV, figure data CSV, and a dependency-free SVG bar chart
//! with error bars.
//!
//! Writes into `target/report_demo/`.
//!
//! ```bash
//! cargo run -p confounders --example render_report
//! ```

use confounders::eval::MetricSummary;
use confounders::features::FeatureConfigId;
use confounders::report::{render_figure_data, render_table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fabricate plausible per-split values around the given centers.
fn fake_split_values(centers: [f64; 5], seed: u64) -> Vec<[Option<f64>; 5]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..20)
        .map(|_| centers.map(|c| Some((c + rng.gen_range(-0.05..0.05)).clamp(0.0, 1.0))))
        .collect()
}

fn main() -> confounders::Result<()> {
    let baseline = MetricSummary::from_split_values(
        FeatureConfigId::Baseline,
        "demo-model",
        &fake_split_values([0.72, 0.72, 0.62, 0.67, 0.80], 1),
    )?;
    let candidate = MetricSummary::from_split_values(
        FeatureConfigId::AllConfounders,
        "demo-model",
        &fake_split_values([0.75, 0.74, 0.67, 0.71, 0.81], 2),
    )?;

    let table = render_table(&[baseline.clone(), candidate.clone()])?;
    print!("{}", table.text);

    let figure = render_figure_data(&baseline, &candidate)?;
    println!("\nfigure data:\n{}", figure.csv);
    println!("average improvement: {:+.2}%", figure.improvement.average);

    let out = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../target/report_demo");
    std::fs::create_dir_all(&out).expect("create output dir");
    std::fs::write(out.join("table.txt"), &table.text).expect("write table.txt");
    std::fs::write(out.join("table.csv"), &table.csv).expect("write table.csv");
    std::fs::write(out.join("figure.csv"), &figure.csv).expect("write figure.csv");
    std::fs::write(out.join("figure.svg"), &figure.svg).expect("write figure.svg");
    println!(
        "wrote table.txt, table.csv, figure.csv, figure.svg to {}",
        out.display()
    );
    Ok(())
}
