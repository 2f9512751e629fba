//! Per-configuration feature matrices: the nine clinical columns joined
//! with cached likelihood scores.
//!
//! Column orders are fixed so feature-importance and audit outputs are
//! comparable across runs: clinical columns follow
//! [`crate::dataset::FEATURE_NAMES`]; `AllConfounders` appends the
//! diabetes, CVD, obesity likelihoods in that order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label, FEATURE_NAMES};
use crate::error::{Error, Result};
use crate::llm::{Condition, ScoreStore};

/// The six evaluated feature configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureConfigId {
    Baseline,
    LlmOnly,
    WithDiabetes,
    WithCvd,
    WithObesity,
    AllConfounders,
}

impl FeatureConfigId {
    /// Report column order.
    pub const ALL: [FeatureConfigId; 6] = [
        FeatureConfigId::Baseline,
        FeatureConfigId::LlmOnly,
        FeatureConfigId::WithDiabetes,
        FeatureConfigId::WithCvd,
        FeatureConfigId::WithObesity,
        FeatureConfigId::AllConfounders,
    ];

    /// Stable lowercase token for CLI arguments and CSV cells.
    pub fn token(self) -> &'static str {
        match self {
            FeatureConfigId::Baseline => "baseline",
            FeatureConfigId::LlmOnly => "llm-only",
            FeatureConfigId::WithDiabetes => "diabetes",
            FeatureConfigId::WithCvd => "cvd",
            FeatureConfigId::WithObesity => "obesity",
            FeatureConfigId::AllConfounders => "all-confounders",
        }
    }

    /// Column heading used in rendered tables.
    pub fn label(self) -> &'static str {
        match self {
            FeatureConfigId::Baseline => "Baseline",
            FeatureConfigId::LlmOnly => "LLM",
            FeatureConfigId::WithDiabetes => "wDiabetes",
            FeatureConfigId::WithCvd => "wCVD",
            FeatureConfigId::WithObesity => "wObesity",
            FeatureConfigId::AllConfounders => "wAllConfounders",
        }
    }

    /// Conditions whose scores this configuration joins in.
    pub fn conditions(self) -> &'static [Condition] {
        match self {
            FeatureConfigId::Baseline => &[],
            FeatureConfigId::LlmOnly => &[Condition::BreastCancer],
            FeatureConfigId::WithDiabetes => &[Condition::Diabetes],
            FeatureConfigId::WithCvd => &[Condition::Cvd],
            FeatureConfigId::WithObesity => &[Condition::Obesity],
            FeatureConfigId::AllConfounders => {
                &[Condition::Diabetes, Condition::Cvd, Condition::Obesity]
            }
        }
    }
}

impl fmt::Display for FeatureConfigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

impl FromStr for FeatureConfigId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(FeatureConfigId::Baseline),
            "llm-only" | "llm" => Ok(FeatureConfigId::LlmOnly),
            "diabetes" => Ok(FeatureConfigId::WithDiabetes),
            "cvd" => Ok(FeatureConfigId::WithCvd),
            "obesity" => Ok(FeatureConfigId::WithObesity),
            "all-confounders" => Ok(FeatureConfigId::AllConfounders),
            other => Err(Error::InvalidParam {
                reason: format!("unknown feature configuration {other:?}"),
            }),
        }
    }
}

/// Row-per-patient numeric matrix for one configuration. Row order is
/// dataset record order; labels map cancer to `true`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub config: FeatureConfigId,
    pub column_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.column_names.len()
    }

    /// CSV with header `column_names..., label` (label 1 = cancer).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.column_names.join(","));
        out.push_str(",label\n");
        for (row, &label) in self.rows.iter().zip(&self.labels) {
            for v in row {
                out.push_str(&format!("{v},"));
            }
            out.push_str(if label { "1\n" } else { "0\n" });
        }
        out
    }
}

/// Assembly options; the defaults match the evaluated configurations.
#[derive(Debug, Clone, Copy, Default)]
pub struct AssembleOptions {
    /// Also append the breast-cancer likelihood column to `AllConfounders`
    /// (13 columns instead of 12). Off by default; provided for sensitivity
    /// analysis only.
    pub bc_likelihood_in_all_confounders: bool,
}

fn likelihood_column_name(condition: Condition) -> String {
    format!("{}_likelihood", condition.token().replace('-', "_"))
}

/// Assemble the matrix for `config`, joining scores for `model_id` from the
/// store. `Baseline` never reads the store.
pub fn assemble(
    dataset: &Dataset,
    store: &ScoreStore,
    model_id: &str,
    config: FeatureConfigId,
) -> Result<FeatureMatrix> {
    assemble_with(dataset, store, model_id, config, AssembleOptions::default())
}

pub fn assemble_with(
    dataset: &Dataset,
    store: &ScoreStore,
    model_id: &str,
    config: FeatureConfigId,
    options: AssembleOptions,
) -> Result<FeatureMatrix> {
    let mut conditions: Vec<Condition> = config.conditions().to_vec();
    if config == FeatureConfigId::AllConfounders && options.bc_likelihood_in_all_confounders {
        conditions.push(Condition::BreastCancer);
    }

    if !conditions.is_empty() {
        let missing = store.missing_for(dataset, &conditions, model_id);
        if !missing.is_empty() {
            return Err(Error::IncompleteStore {
                model_id: model_id.to_string(),
                missing,
            });
        }
    }

    let clinical = config != FeatureConfigId::LlmOnly;
    let mut column_names: Vec<String> = Vec::new();
    if clinical {
        column_names.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    }
    column_names.extend(conditions.iter().map(|&c| likelihood_column_name(c)));

    let mut rows = Vec::with_capacity(dataset.len());
    let mut labels = Vec::with_capacity(dataset.len());
    for record in dataset.records() {
        let mut row: Vec<f64> = Vec::with_capacity(column_names.len());
        if clinical {
            row.extend(record.features());
        }
        for &c in &conditions {
            let score = store
                .get(record.id, c, model_id)
                .expect("completeness checked above");
            row.push(score.value);
        }
        rows.push(row);
        labels.push(record.label == Label::Cancer);
    }

    Ok(FeatureMatrix {
        config,
        column_names,
        rows,
        labels,
    })
}
