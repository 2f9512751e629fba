//! Text and CSV rendering of metric summaries: metrics as rows,
//! configurations as columns, values to three decimals.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::eval::{Metric, MetricSummary};
use crate::features::FeatureConfigId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedTable {
    pub text: String,
    pub csv: String,
}

/// Render one table block per model. Configurations appear in
/// [`FeatureConfigId::ALL`] order; values use three decimals (Rust's
/// round-half-even float formatting). The CSV keeps full precision and
/// carries stderr columns.
pub fn render_table(summaries: &[MetricSummary]) -> Result<RenderedTable> {
    if summaries.is_empty() {
        return Err(Error::EmptyInput { what: "summaries" });
    }

    let mut by_model: BTreeMap<&str, BTreeMap<FeatureConfigId, &MetricSummary>> = BTreeMap::new();
    for s in summaries {
        let entry = by_model.entry(&s.model_id).or_default();
        if entry.insert(s.config, s).is_some() {
            return Err(Error::SummaryMismatch {
                reason: format!(
                    "duplicate summary for (config {}, model {:?})",
                    s.config.token(),
                    s.model_id
                ),
            });
        }
    }

    let mut text = String::new();
    let mut csv = String::from("model_id,config,metric,mean,stderr,n_defined\n");
    let mut first = true;
    for (model, configs) in &by_model {
        if !first {
            text.push('\n');
        }
        first = false;
        text.push_str(&format!("Model: {model}\n"));

        let present: Vec<FeatureConfigId> = FeatureConfigId::ALL
            .into_iter()
            .filter(|c| configs.contains_key(c))
            .collect();

        text.push_str(&format!("{:<12}", "Metric"));
        for config in &present {
            text.push_str(&format!("  {:>15}", config.label()));
        }
        text.push('\n');
        for metric in Metric::ALL {
            text.push_str(&format!("{:<12}", metric.label()));
            for config in &present {
                let mean = configs[config].mean(metric);
                text.push_str(&format!("  {:>15.3}", mean));
            }
            text.push('\n');
        }

        for config in &present {
            let summary = configs[config];
            for metric in Metric::ALL {
                let stat = summary.stat(metric);
                csv.push_str(&format!(
                    "{model},{},{},{},{},{}\n",
                    config.token(),
                    metric.token(),
                    stat.mean,
                    stat.stderr,
                    stat.n_defined
                ));
            }
        }
    }

    Ok(RenderedTable { text, csv })
}
