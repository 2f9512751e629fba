//! Classification metrics over a binary confusion matrix, trapezoidal ROC
//! AUC, per-configuration summaries, and improvement over baseline.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureConfigId;

/// The five reported metrics, in fixed report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Accuracy,
    Precision,
    Recall,
    Auc,
    Specificity,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Accuracy,
        Metric::Precision,
        Metric::Recall,
        Metric::Auc,
        Metric::Specificity,
    ];

    /// Lowercase token used in CSV exports.
    pub fn token(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::Auc => "auc",
            Metric::Specificity => "specificity",
        }
    }

    /// Row label used in rendered tables.
    pub fn label(self) -> &'static str {
        match self {
            Metric::Accuracy => "Accuracy",
            Metric::Precision => "Precision",
            Metric::Recall => "Recall",
            Metric::Auc => "AUC",
            Metric::Specificity => "Specificity",
        }
    }

    pub fn index(self) -> usize {
        Metric::ALL.iter().position(|&m| m == self).unwrap()
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.token() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidParam {
                reason: format!("unknown metric {s:?}"),
            })
    }
}

/// 2x2 contingency counts with cancer as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// Count the standard 2x2 contingency table.
pub fn confusion(labels: &[bool], predictions: &[bool]) -> Result<ConfusionMatrix> {
    if labels.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            labels: labels.len(),
            predictions: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput { what: "labels" });
    }
    let mut cm = ConfusionMatrix {
        true_pos: 0,
        false_pos: 0,
        true_neg: 0,
        false_neg: 0,
    };
    for (&y, &p) in labels.iter().zip(predictions) {
        match (y, p) {
            (true, true) => cm.true_pos += 1,
            (false, true) => cm.false_pos += 1,
            (false, false) => cm.true_neg += 1,
            (true, false) => cm.false_neg += 1,
        }
    }
    Ok(cm)
}

/// Threshold metrics from a confusion matrix. A `None` marks an undefined
/// value (zero denominator); it is never coerced to 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMetrics {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
}

pub fn point_metrics(cm: &ConfusionMatrix) -> Result<PointMetrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyInput {
            what: "confusion matrix",
        });
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    Ok(PointMetrics {
        accuracy: (cm.true_pos + cm.true_neg) as f64 / total as f64,
        precision: ratio(cm.true_pos, cm.true_pos + cm.false_pos),
        recall: ratio(cm.true_pos, cm.true_pos + cm.false_neg),
        specificity: ratio(cm.true_neg, cm.true_neg + cm.false_pos),
    })
}

/// Area under the ROC curve by trapezoidal integration over all distinct
/// score thresholds; equal to the Mann-Whitney statistic
/// `(concordant + 0.5 * tied) / (n_pos * n_neg)`.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            labels: labels.len(),
            predictions: scores.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClassLabels);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores must not be NaN")
    });

    // sweep thresholds from high to low, adding a trapezoid at each
    // distinct score value
    let mut area = 0.0;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut prev_tp = 0usize;
    let mut prev_fp = 0usize;
    let mut prev_score = f64::INFINITY;
    for &i in &order {
        if scores[i] != prev_score {
            area += (fp - prev_fp) as f64 * (tp + prev_tp) as f64 / 2.0;
            prev_tp = tp;
            prev_fp = fp;
            prev_score = scores[i];
        }
        if labels[i] {
            tp += 1;
        } else {
            fp += 1;
        }
    }
    area += (fp - prev_fp) as f64 * (tp + prev_tp) as f64 / 2.0;
    Ok(area / (n_pos as f64 * n_neg as f64))
}

/// Mean and standard error of one metric over the split ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStat {
    pub mean: f64,
    pub stderr: f64,
    /// Splits where the metric was defined.
    pub n_defined: usize,
}

/// Per-configuration summary over all splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub config: FeatureConfigId,
    pub model_id: String,
    pub n_splits: usize,
    stats: [MetricStat; 5],
}

impl MetricSummary {
    /// Build from per-split values (one entry per split, `None` when the
    /// metric was undefined for that split). Undefined values are excluded
    /// from the mean; the standard error uses the sample standard deviation
    /// (n-1) over defined values divided by sqrt(count), 0 when fewer than
    /// two values are defined.
    pub fn from_split_values(
        config: FeatureConfigId,
        model_id: &str,
        values: &[[Option<f64>; 5]],
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput {
                what: "split values",
            });
        }
        let mut stats = [MetricStat {
            mean: 0.0,
            stderr: 0.0,
            n_defined: 0,
        }; 5];
        for metric in Metric::ALL {
            let defined: Vec<f64> = values
                .iter()
                .filter_map(|row| row[metric.index()])
                .collect();
            if defined.is_empty() {
                return Err(Error::InvalidParam {
                    reason: format!(
                        "metric {metric} undefined in every split for {}",
                        config.token()
                    ),
                });
            }
            let n = defined.len() as f64;
            let mean = defined.iter().sum::<f64>() / n;
            let stderr = if defined.len() > 1 {
                let var = defined.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            stats[metric.index()] = MetricStat {
                mean,
                stderr,
                n_defined: defined.len(),
            };
        }
        Ok(MetricSummary {
            config,
            model_id: model_id.to_string(),
            n_splits: values.len(),
            stats,
        })
    }

    /// Build directly from known stats (e.g. re-loaded from a CSV).
    pub fn from_stats(
        config: FeatureConfigId,
        model_id: &str,
        n_splits: usize,
        stats: [MetricStat; 5],
    ) -> Self {
        MetricSummary {
            config,
            model_id: model_id.to_string(),
            n_splits,
            stats,
        }
    }

    pub fn stat(&self, metric: Metric) -> MetricStat {
        self.stats[metric.index()]
    }

    pub fn mean(&self, metric: Metric) -> f64 {
        self.stat(metric).mean
    }
}

/// Relative improvement of `candidate` over `baseline`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Improvement {
    /// Percent change per metric, in [`Metric::ALL`] order.
    pub per_metric: [f64; 5],
    /// Unweighted mean of the five percent changes.
    pub average: f64,
}

impl Improvement {
    pub fn for_metric(&self, metric: Metric) -> f64 {
        self.per_metric[metric.index()]
    }
}

/// Per-metric `100 * (candidate - baseline) / baseline` and its unweighted
/// average. Requires matching split counts and strictly positive baseline
/// means.
pub fn percent_improvement(
    candidate: &MetricSummary,
    baseline: &MetricSummary,
) -> Result<Improvement> {
    if candidate.n_splits != baseline.n_splits {
        return Err(Error::SummaryMismatch {
            reason: format!(
                "n_splits differ: {} vs {}",
                candidate.n_splits, baseline.n_splits
            ),
        });
    }
    let mut per_metric = [0.0; 5];
    for metric in Metric::ALL {
        let base = baseline.mean(metric);
        if base <= 0.0 {
            return Err(Error::ZeroBaseline {
                metric: metric.token(),
            });
        }
        per_metric[metric.index()] = 100.0 * (candidate.mean(metric) - base) / base;
    }
    let average = per_metric.iter().sum::<f64>() / per_metric.len() as f64;
    Ok(Improvement {
        per_metric,
        average,
    })
}
