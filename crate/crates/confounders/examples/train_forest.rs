//! Train the from-scratch random forest on a synthetic two-feature task
//! and inspect its behavior: gini impurity, a single split, ensemble
//! probabilities, and JSON serialization of the trained model.
//!
//! ```bash
//! cargo run -p confounders --example train_forest
//! ```

use confounders::forest::{best_split, fit_rows, gini, ForestParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> confounders::Result<()> {
    println!("gini([+,+,-])        = {:.4}", gini(&[true, true, false])?);
    println!("gini(pure node)      = {:.4}", gini(&[true, true])?);

    let toy_rows: Vec<Vec<f64>> = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
    let toy_labels = [false, false, true, true];
    let split = best_split(&toy_rows, &toy_labels, &[0, 1, 2, 3], &[0], 1).unwrap();
    println!(
        "best split of [1,2,3,4]/[--++]: feature {} at {} (weighted impurity {})\n",
        split.feature_index, split.threshold, split.weighted_impurity
    );

    // noisy diagonal boundary: label = x + 0.5*y > 7.5
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let rows: Vec<Vec<f64>> = (0..200)
        .map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)])
        .collect();
    let labels: Vec<bool> = rows.iter().map(|r| r[0] + 0.5 * r[1] > 7.5).collect();

    let params = ForestParams {
        n_trees: 100,
        seed: 42,
        ..ForestParams::default()
    };
    let forest = fit_rows(&rows, &labels, &params)?;

    let training_accuracy = rows
        .iter()
        .zip(&labels)
        .filter(|(row, &label)| forest.predict(row, 0.5).unwrap() == label)
        .count() as f64
        / rows.len() as f64;
    println!("forest: {} trees, p = {}", forest.trees().len(), forest.p());
    println!("training accuracy: {training_accuracy:.3}");

    for probe in [[9.0, 9.0], [7.0, 4.0], [1.0, 1.0]] {
        println!(
            "P(positive | x={:.0}, y={:.0}) = {:.3}",
            probe[0],
            probe[1],
            forest.predict_proba(&probe)?
        );
    }

    let json = serde_json::to_string(&forest).expect("forest serializes");
    println!(
        "\nserialized forest: {} bytes of JSON (audit format, not stability-guaranteed)",
        json.len()
    );
    Ok(())
}
