//! Rendering: calibration tables, reliability plots, and decision bands.
//!
//! All output here is byte-deterministic for identical inputs — tables use
//! fixed-width formatting and plots are hand-laid-out SVG 1.1 with pinned
//! geometry, so goldens and cross-run comparisons are exact. Plot annotations
//! are copied from a [`CalibrationReport`] rather than recomputed, so a plot
//! can never disagree with the table it accompanies.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::confidence::Measure;
use crate::correctness::Notion;
use crate::metrics::{CalibrationReport, ReliabilityBins};

/// Graduated actions keyed by confidence: each band owns `[lower, next)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionBands {
    bands: Vec<(f64, String)>,
}

impl DecisionBands {
    /// Validates that lowers start at 0, increase strictly, and stay in
    /// [0, 1], which together make the bands cover [0, 1] without gaps.
    pub fn new(bands: Vec<(f64, String)>) -> Result<Self, ReportError> {
        if bands.is_empty() {
            return Err(ReportError::InvalidBands("no bands given".to_string()));
        }
        if bands[0].0 != 0.0 {
            return Err(ReportError::InvalidBands(format!(
                "first band must start at 0, got {}",
                bands[0].0
            )));
        }
        for pair in bands.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(ReportError::InvalidBands(format!(
                    "band lowers must increase strictly: {} then {}",
                    pair[0].0, pair[1].0
                )));
            }
        }
        if bands.iter().any(|(lo, _)| !(0.0..=1.0).contains(lo)) {
            return Err(ReportError::InvalidBands(
                "band lowers must lie in [0, 1]".to_string(),
            ));
        }
        Ok(DecisionBands { bands })
    }

    pub fn bands(&self) -> &[(f64, String)] {
        &self.bands
    }
}

impl Default for DecisionBands {
    /// The illustrative accept / self-review / careful-review / reject
    /// ladder: ≥ 0.90 accept, ≥ 0.70 self review, ≥ 0.10 careful review,
    /// below that reject.
    fn default() -> Self {
        DecisionBands::new(vec![
            (0.0, "reject".to_string()),
            (0.10, "careful review".to_string()),
            (0.70, "self review".to_string()),
            (0.90, "accept".to_string()),
        ])
        .expect("default bands are valid")
    }
}

/// Action for confidence `c`: the band with the greatest lower bound ≤ c.
pub fn apply_bands(bands: &DecisionBands, c: f64) -> &str {
    let mut action = bands.bands[0].1.as_str();
    for (lower, candidate) in &bands.bands {
        if c >= *lower {
            action = candidate;
        } else {
            break;
        }
    }
    action
}

/// Output format for [`render_report_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

/// One table row: a calibration report keyed by what produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub measure: Measure,
    pub notion: Notion,
    /// False for raw confidences, true for cross-fold rescaled ones.
    pub rescaled: bool,
    pub report: CalibrationReport,
}

/// Skill below this renders the "misleading ECE" footnote on rows that still
/// carry an ECE: a base-rate predictor scores a deceptively low ECE.
const MISLEADING_SKILL: f64 = 0.005;

fn misleading_note() -> &'static str {
    "skill ~ 0: a near-zero ECE here reflects base-rate prediction, not informative calibration \
     (misleading on its own)"
}

/// Renders one row per (measure, notion, variant) in the given order, with
/// values rounded to two decimals (CSV can keep full precision instead).
/// A row whose `ece_omitted_reason` is set gets a blank ECE cell and a
/// footnote; a row with ECE present but near-zero skill gets a footnote
/// warning that the ECE is misleading.
pub fn render_report_table(
    rows: &[ReportRow],
    format: TableFormat,
    full_precision: bool,
) -> String {
    match format {
        TableFormat::Markdown => render_markdown_table(rows),
        TableFormat::Csv => render_csv_table(rows, full_precision),
    }
}

fn row_note(row: &ReportRow) -> Option<String> {
    if let Some(reason) = &row.report.ece_omitted_reason {
        return Some(reason.clone());
    }
    if row.report.ece.is_some() && row.report.skill < MISLEADING_SKILL {
        return Some(misleading_note().to_string());
    }
    None
}

fn render_markdown_table(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    let mut footnotes: Vec<String> = Vec::new();
    out.push_str(
        "| measure         | notion      | variant  |      n | base rate | brier | b_ref | skill  | ece      | auc  |\n",
    );
    out.push_str(
        "|-----------------|-------------|----------|--------|-----------|-------|-------|--------|----------|------|\n",
    );
    for row in rows {
        let r = &row.report;
        let note = row_note(row);
        let marker = note.map(|text| {
            footnotes.push(text);
            format!("[{}]", footnotes.len())
        });
        let ece_cell = match (r.ece, &marker) {
            (Some(e), Some(m)) => format!("{e:.2} {m}"),
            (Some(e), None) => format!("{e:.2}"),
            (None, Some(m)) => format!("-- {m}"),
            (None, None) => "--".to_string(),
        };
        let _ = writeln!(
            out,
            "| {:<15} | {:<11} | {:<8} | {:>6} | {:>9.2} | {:>5.2} | {:>5.2} | {:>6.2} | {:<8} | {:>4.2} |",
            row.measure.name(),
            row.notion.name(),
            if row.rescaled { "rescaled" } else { "raw" },
            r.n,
            r.base_rate,
            r.brier,
            r.brier_ref,
            r.skill,
            ece_cell,
            r.auc,
        );
    }
    if !footnotes.is_empty() {
        out.push('\n');
        for (i, text) in footnotes.iter().enumerate() {
            let _ = writeln!(out, "[{}] {}", i + 1, text);
        }
    }
    out
}

/// RFC 4180 field quoting: wrap in quotes when the field contains a comma,
/// quote, or line break, doubling any embedded quotes.
pub fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn render_csv_table(rows: &[ReportRow], full_precision: bool) -> String {
    let fmt = |v: f64| -> String {
        if full_precision {
            format!("{v}")
        } else {
            format!("{v:.2}")
        }
    };
    let mut out = String::new();
    out.push_str("measure,notion,variant,n,base_rate,brier,brier_ref,skill,ece,auc,note\n");
    for row in rows {
        let r = &row.report;
        let ece_cell = r.ece.map(fmt).unwrap_or_default();
        let note = row_note(row).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.measure.name(),
            row.notion.name(),
            if row.rescaled { "rescaled" } else { "raw" },
            r.n,
            fmt(r.base_rate),
            fmt(r.brier),
            fmt(r.brier_ref),
            fmt(r.skill),
            ece_cell,
            fmt(r.auc),
            csv_field(&note),
        );
    }
    out
}

/// Metric values stamped onto a plot. Constructed from the report the plot
/// belongs to (see [`PlotSpec::from_report`]) so the two cannot drift apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotAnnotations {
    pub brier: f64,
    pub brier_ref: f64,
    pub ece: Option<f64>,
    pub skill: f64,
}

/// Everything needed to draw one reliability plot.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub bins: ReliabilityBins,
    pub annotations: PlotAnnotations,
    /// Optional second binning drawn as a line series over the bars,
    /// typically a 5-bin quantile view of the same samples.
    pub quantile_overlay: Option<ReliabilityBins>,
    pub title: String,
}

impl PlotSpec {
    pub fn from_report(
        bins: ReliabilityBins,
        report: &CalibrationReport,
        quantile_overlay: Option<ReliabilityBins>,
        title: impl Into<String>,
    ) -> Self {
        PlotSpec {
            bins,
            annotations: PlotAnnotations {
                brier: report.brier,
                brier_ref: report.brier_ref,
                ece: report.ece,
                skill: report.skill,
            },
            quantile_overlay,
            title: title.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid decision bands: {0}")]
    InvalidBands(String),
    #[error("cannot plot an empty bin list")]
    EmptyBins,
}

// Pinned plot geometry: the unit square maps to a 400x400 region with the
// origin of data space at pixel (70, 440). Tests assert these numbers.
const PLOT: f64 = 400.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const SVG_W: f64 = 500.0;
const SVG_H: f64 = 500.0;

fn px_x(v: f64) -> f64 {
    LEFT + PLOT * v
}

fn px_y(v: f64) -> f64 {
    TOP + PLOT * (1.0 - v)
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn svg_header(title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">"
    );
    let _ = writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
        LEFT + PLOT / 2.0,
        escape_xml(title)
    );
    out
}

fn svg_axes(out: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        "  <rect x=\"{LEFT:.2}\" y=\"{TOP:.2}\" width=\"{PLOT:.2}\" height=\"{PLOT:.2}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>"
    );
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">{v:.1}</text>",
            px_x(v),
            px_y(0.0) + 16.0
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{v:.1}</text>",
            LEFT - 8.0,
            px_y(v) + 3.0
        );
    }
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
        LEFT + PLOT / 2.0,
        px_y(0.0) + 40.0,
        escape_xml(x_label)
    );
    let _ = writeln!(
        out,
        "  <text x=\"25\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 25 {:.2})\">{}</text>",
        TOP + PLOT / 2.0,
        TOP + PLOT / 2.0,
        escape_xml(y_label)
    );
}

/// Renders the reliability diagram as a standalone SVG document: the unit
/// square with the diagonal reference, one bar per bin at height `corr`,
/// the per-bin sample count at the bar base, the metric annotation box, and
/// the optional quantile overlay as a line series.
pub fn render_reliability_svg(spec: &PlotSpec) -> Result<String, ReportError> {
    if spec.bins.bins.is_empty() {
        return Err(ReportError::EmptyBins);
    }
    let mut out = svg_header(&spec.title);
    // Diagonal reference: perfect calibration.
    let _ = writeln!(
        out,
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>",
        px_x(0.0),
        px_y(0.0),
        px_x(1.0),
        px_y(1.0)
    );
    for bin in &spec.bins.bins {
        let x = px_x(bin.lo);
        let width = PLOT * (bin.hi - bin.lo);
        let y = px_y(bin.corr);
        let height = PLOT * bin.corr;
        let _ = writeln!(
            out,
            "  <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{width:.2}\" height=\"{height:.2}\" fill=\"#4c78a8\" fill-opacity=\"0.85\" stroke=\"#2f4b6e\" stroke-width=\"0.5\"/>"
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">{}</text>",
            px_x((bin.lo + bin.hi) / 2.0),
            px_y(0.0) - 4.0,
            bin.count
        );
    }
    if let Some(overlay) = &spec.quantile_overlay {
        let points: Vec<String> = overlay
            .bins
            .iter()
            .filter(|b| b.count > 0)
            .map(|b| format!("{:.2},{:.2}", px_x(b.conf), px_y(b.corr)))
            .collect();
        if !points.is_empty() {
            let _ = writeln!(
                out,
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>",
                points.join(" ")
            );
            for point in &points {
                let (px, py) = point.split_once(',').expect("point format");
                let _ = writeln!(
                    out,
                    "  <circle cx=\"{px}\" cy=\"{py}\" r=\"3\" fill=\"#d62728\"/>"
                );
            }
        }
    }
    // Annotation box, top-left inside the plot area.
    let a = &spec.annotations;
    let ece_text = match a.ece {
        Some(e) => format!("ECE = {e:.2}"),
        None => "ECE = omitted".to_string(),
    };
    let lines = [
        format!("B = {:.2}", a.brier),
        format!("B_ref = {:.2}", a.brier_ref),
        format!("SS = {:.2}", a.skill),
        ece_text,
    ];
    for (i, line) in lines.iter().enumerate() {
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">{}</text>",
            LEFT + 8.0,
            TOP + 16.0 + 14.0 * i as f64,
            escape_xml(line)
        );
    }
    svg_axes(&mut out, "confidence", "fraction correct");
    out.push_str("</svg>\n");
    Ok(out)
}

/// Renders and writes a reliability plot to `path`.
pub fn emit_reliability_plot(spec: &PlotSpec, path: &Path) -> Result<(), ReportError> {
    let svg = render_reliability_svg(spec)?;
    fs::write(path, svg).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Renders an ROC curve (false-positive rate vs true-positive rate) as a
/// line series with the chance diagonal and the AUC printed in a corner.
pub fn render_roc_svg(points: &[(f64, f64)], auc: f64, title: &str) -> String {
    let mut out = svg_header(title);
    let _ = writeln!(
        out,
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>",
        px_x(0.0),
        px_y(0.0),
        px_x(1.0),
        px_y(1.0)
    );
    let series: Vec<String> = points
        .iter()
        .map(|&(fpr, tpr)| format!("{:.2},{:.2}", px_x(fpr), px_y(tpr)))
        .collect();
    let _ = writeln!(
        out,
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#4c78a8\" stroke-width=\"1.5\"/>",
        series.join(" ")
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">AUC = {auc:.2}</text>",
        LEFT + 8.0,
        TOP + 16.0
    );
    svg_axes(&mut out, "false positive rate", "true positive rate");
    out.push_str("</svg>\n");
    out
}

/// Renders and writes an ROC plot to `path`.
pub fn emit_roc_plot(
    points: &[(f64, f64)],
    auc: f64,
    title: &str,
    path: &Path,
) -> Result<(), ReportError> {
    let svg = render_roc_svg(points, auc, title);
    fs::write(path, svg).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}
