//! Baseline-vs-candidate comparison: a plot-data CSV and a self-contained
//! grouped bar chart as hand-generated SVG (two bars per metric with
//! +/- 1 stderr whiskers, y axis fixed to [0, 1]).

use crate::error::{Error, Result};
use crate::eval::{percent_improvement, Improvement, Metric, MetricSummary};

#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub csv: String,
    pub svg: String,
    pub improvement: Improvement,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 64.0;
const BAR_WIDTH: f64 = 44.0;
const BAR_GAP: f64 = 10.0;
const BASELINE_FILL: &str = "#5b8db8";
const CANDIDATE_FILL: &str = "#e0914f";

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Compare two summaries of the same model over the same split count.
pub fn render_figure_data(
    baseline: &MetricSummary,
    candidate: &MetricSummary,
) -> Result<FigureData> {
    if baseline.model_id != candidate.model_id {
        return Err(Error::SummaryMismatch {
            reason: format!(
                "model ids differ: {:?} vs {:?}",
                baseline.model_id, candidate.model_id
            ),
        });
    }
    let improvement = percent_improvement(candidate, baseline)?;

    let mut csv = String::from(
        "metric,baseline_mean,baseline_stderr,candidate_mean,candidate_stderr,percent_improvement\n",
    );
    for metric in Metric::ALL {
        let b = baseline.stat(metric);
        let c = candidate.stat(metric);
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            metric.token(),
            b.mean,
            b.stderr,
            c.mean,
            c.stderr,
            improvement.for_metric(metric)
        ));
    }

    let svg = render_svg(baseline, candidate);
    Ok(FigureData {
        csv,
        svg,
        improvement,
    })
}

fn render_svg(baseline: &MetricSummary, candidate: &MetricSummary) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let y = |v: f64| MARGIN_TOP + (1.0 - v) * plot_h;
    let group_w = plot_w / Metric::ALL.len() as f64;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str(&format!(
        "  <title>{} vs {} (model {}) — mean ± stderr over {} splits</title>\n",
        xml_escape(baseline.config.label()),
        xml_escape(candidate.config.label()),
        xml_escape(&baseline.model_id),
        baseline.n_splits
    ));
    s.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // y axis with ticks every 0.2
    s.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{:.2}\" x2=\"{MARGIN_LEFT}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        y(1.0),
        y(0.0)
    ));
    for tick in 0..=5 {
        let v = tick as f64 / 5.0;
        s.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{MARGIN_LEFT}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            MARGIN_LEFT - 5.0,
            y(v),
            y(v)
        ));
        s.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\" \
             dominant-baseline=\"middle\">{v:.1}</text>\n",
            MARGIN_LEFT - 9.0,
            y(v)
        ));
    }
    // x axis
    s.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        y(0.0),
        WIDTH - MARGIN_RIGHT,
        y(0.0)
    ));

    for (g, metric) in Metric::ALL.into_iter().enumerate() {
        let group_x = MARGIN_LEFT + g as f64 * group_w;
        let pair_w = 2.0 * BAR_WIDTH + BAR_GAP;
        let start_x = group_x + (group_w - pair_w) / 2.0;

        for (slot, summary, fill) in [
            (0.0, baseline, BASELINE_FILL),
            (1.0, candidate, CANDIDATE_FILL),
        ] {
            let stat = summary.stat(metric);
            let x = start_x + slot * (BAR_WIDTH + BAR_GAP);
            let top = y(stat.mean.clamp(0.0, 1.0));
            s.push_str(&format!(
                "  <rect class=\"bar\" x=\"{x:.2}\" y=\"{top:.2}\" width=\"{BAR_WIDTH}\" \
                 height=\"{:.2}\" fill=\"{fill}\"/>\n",
                y(0.0) - top
            ));

            let cx = x + BAR_WIDTH / 2.0;
            let lo = y((stat.mean - stat.stderr).clamp(0.0, 1.0));
            let hi = y((stat.mean + stat.stderr).clamp(0.0, 1.0));
            s.push_str("  <g class=\"whisker\" stroke=\"black\">\n");
            s.push_str(&format!(
                "    <line x1=\"{cx:.2}\" y1=\"{hi:.2}\" x2=\"{cx:.2}\" y2=\"{lo:.2}\"/>\n"
            ));
            s.push_str(&format!(
                "    <line x1=\"{:.2}\" y1=\"{hi:.2}\" x2=\"{:.2}\" y2=\"{hi:.2}\"/>\n",
                cx - 8.0,
                cx + 8.0
            ));
            s.push_str(&format!(
                "    <line x1=\"{:.2}\" y1=\"{lo:.2}\" x2=\"{:.2}\" y2=\"{lo:.2}\"/>\n",
                cx - 8.0,
                cx + 8.0
            ));
            s.push_str("  </g>\n");
        }

        s.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            group_x + group_w / 2.0,
            y(0.0) + 20.0,
            xml_escape(metric.label())
        ));
    }

    // legend
    let legend_y = HEIGHT - 22.0;
    for (i, (label, fill)) in [
        (baseline.config.label(), BASELINE_FILL),
        (candidate.config.label(), CANDIDATE_FILL),
    ]
    .into_iter()
    .enumerate()
    {
        let x = MARGIN_LEFT + i as f64 * 180.0;
        s.push_str(&format!(
            "  <rect x=\"{x:.2}\" y=\"{:.2}\" width=\"14\" height=\"14\" fill=\"{fill}\"/>\n",
            legend_y - 11.0
        ));
        s.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{legend_y:.2}\" font-size=\"13\">{}</text>\n",
            x + 20.0,
            xml_escape(label)
        ));
    }

    s.push_str("</svg>\n");
    s
}
