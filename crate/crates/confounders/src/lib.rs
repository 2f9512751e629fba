//! Confounder-likelihood synthetic features for breast-cancer
//! classification.
//!
//! The pipeline augments nine routine clinical features (age, BMI, glucose,
//! insulin, HOMA, leptin, adiponectin, resistin, MCP-1) with
//! model-inferred likelihoods of three confounding conditions (type-2
//! diabetes, obesity, cardiovascular disease) plus a breast-cancer
//! likelihood, then measures how a from-scratch random forest performs
//! under six feature configurations over repeated 80/20 holdout splits.
//!
//! The pieces:
//!
//! - [`dataset`]: CSV loading and validation (label encoding: 1 = healthy,
//!   2 = cancer)
//! - [`llm`]: prompt construction, an OpenAI-compatible chat-completions
//!   client with retry and a JSONL score cache, and a deterministic
//!   offline mock provider
//! - [`features`]: per-configuration feature matrices
//! - [`forest`]: CART/Gini random forest with seeded, schedule-independent
//!   training
//! - [`eval`]: seeded split plans, the five metrics, and the repeated
//!   holdout runner
//! - [`report`]: metric tables, comparison figure (CSV + SVG), run
//!   manifest
//! - [`cli`]: the `fetch-scores` / `run` / `mock-run` / `report`
//!   subcommands
//!
//! Every run is a pure function of its inputs and seed: identical inputs
//! give byte-identical per-split outputs regardless of thread count.
//!
//! See the `examples/` directory for one runnable example per capability;
//! start with `mock_pipeline`:
//!
//! ```bash
//! cargo run -p confounders --example mock_pipeline --release
//! ```

pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod forest;
pub mod llm;
pub mod report;
mod rng;

pub use dataset::{load_dataset, summarize, Dataset, Label, PatientRecord};
pub use error::{Error, Result};
pub use eval::{
    auc, confusion, make_splits, percent_improvement, point_metrics, run_experiment, Metric,
    MetricSummary, SplitPlan,
};
pub use features::{assemble, FeatureConfigId, FeatureMatrix};
pub use forest::{fit, Forest, ForestParams};
pub use llm::{
    build_prompt, fetch_scores, mock_provider, parse_score, Condition, LikelihoodScore,
    ProviderConfig, ScoreStore,
};
