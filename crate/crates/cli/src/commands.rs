//! The three subcommands: `validate`, `analyze`, and `synth`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use codecal::confidence::{score_record, CorpusLengthStats, Measure};
use codecal::correctness::{cross_tab, label_record};
use codecal::metrics::{bin_samples, report, roc_points, BinningScheme, ScoredSample};
use codecal::records::{load_records, save_records, validate_record, GenerationRecord};
use codecal::report::{
    emit_reliability_plot, emit_roc_plot, render_report_table, PlotSpec, ReportRow, TableFormat,
};
use codecal::rescale::{cross_fold_rescale_with, detect_collapse};
use codecal::synth::synth_corpus;

use crate::{CliError, RunConfig, SynthConfig};

/// Checks every file against the schema and field invariants, listing each
/// violation on standard output. Succeeds only if nothing is wrong.
pub fn cmd_validate(paths: &[PathBuf]) -> Result<(), CliError> {
    let mut total_records = 0usize;
    let mut total_violations = 0usize;

    for path in paths {
        let outcome = load_records(path)?;
        if outcome.unknown_field_count > 0 {
            eprintln!(
                "warning: {}: {} unknown field(s) ignored",
                path.display(),
                outcome.unknown_field_count
            );
        }
        total_records += outcome.records.len();
        for record in &outcome.records {
            for violation in validate_record(record) {
                println!(
                    "{}: {}: {}: {}",
                    path.display(),
                    record.record_id,
                    violation.field,
                    violation.message
                );
                total_violations += 1;
            }
        }
    }

    if total_violations > 0 {
        Err(CliError::Data(format!(
            "{total_violations} violation(s) across {total_records} record(s)"
        )))
    } else {
        println!(
            "{} record(s) in {} file(s): no violations",
            total_records,
            paths.len()
        );
        Ok(())
    }
}

/// Loads and merges the input corpora, rejecting duplicate record ids across
/// files (within-file duplicates are caught at load time).
fn load_corpus(inputs: &[PathBuf]) -> Result<Vec<GenerationRecord>, CliError> {
    let mut records = Vec::new();
    let mut sources: HashMap<String, PathBuf> = HashMap::new();
    for path in inputs {
        let outcome = load_records(path)?;
        if outcome.unknown_field_count > 0 {
            eprintln!(
                "warning: {}: {} unknown field(s) ignored",
                path.display(),
                outcome.unknown_field_count
            );
        }
        for record in outcome.records {
            if let Some(first) = sources.get(&record.record_id) {
                return Err(CliError::Data(format!(
                    "duplicate record id `{}`: appears in {} and {}",
                    record.record_id,
                    first.display(),
                    path.display()
                )));
            }
            sources.insert(record.record_id.clone(), path.clone());
            records.push(record);
        }
    }
    if records.is_empty() {
        return Err(CliError::Data("no records in the input corpus".into()));
    }
    Ok(records)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// The full pipeline: validate, label, score each measure, compute raw and
/// cross-fold-rescaled calibration reports, and emit tables and plots.
pub fn cmd_analyze(config: &RunConfig) -> Result<(), CliError> {
    let records = load_corpus(&config.inputs)?;

    // The corpus must be internally consistent before anything is computed.
    let mut violations = 0usize;
    for record in &records {
        for violation in validate_record(record) {
            eprintln!(
                "invalid record {}: {}: {}",
                record.record_id, violation.field, violation.message
            );
            violations += 1;
        }
    }
    if violations > 0 {
        return Err(CliError::Data(format!(
            "{violations} validation failure(s); run `codecal validate` for the full listing"
        )));
    }

    // Correctness labels. A record that cannot be labeled under the chosen
    // notion is a data error, not a skippable condition: without labels
    // nothing downstream is defined.
    let labels: Vec<bool> = records
        .iter()
        .map(|r| label_record(r, config.notion).map(|l| l.correct))
        .collect::<Result<_, _>>()?;
    let correct_count = labels.iter().filter(|&&c| c).count();
    if correct_count == 0 || correct_count == labels.len() {
        return Err(CliError::Data(format!(
            "corpus is single-class under {} ({} of {} correct): ranking metrics are undefined",
            config.notion,
            correct_count,
            labels.len()
        )));
    }

    let length_stats = CorpusLengthStats::from_records(&records)?;

    fs::create_dir_all(&config.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", config.out.display())))?;
    let plots_dir = config.out.join("plots");
    fs::create_dir_all(&plots_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", plots_dir.display())))?;

    let mut rows: Vec<ReportRow> = Vec::new();
    let mut skipped = 0usize;

    for &measure in &config.measures {
        // A measure only applies when every record carries its field; a
        // partial corpus would silently bias the comparison against the
        // measures that are fully populated.
        let missing = records
            .iter()
            .filter(|r| !has_measure_field(r, measure))
            .count();
        if missing > 0 {
            eprintln!(
                "warning: skipping {measure}: {missing} of {} record(s) lack {}",
                records.len(),
                measure.required_field()
            );
            skipped += 1;
            continue;
        }

        let mut scores = Vec::with_capacity(records.len());
        let mut fallbacks = 0usize;
        let mut failed: Option<String> = None;
        for record in &records {
            match score_record(record, measure, Some(&length_stats)) {
                Ok(score) => {
                    if score.fallback_used {
                        fallbacks += 1;
                    }
                    scores.push(score.value);
                }
                Err(err) => {
                    failed = Some(format!("record {}: {err}", record.record_id));
                    break;
                }
            }
        }
        if let Some(why) = failed {
            eprintln!("warning: skipping {measure}: {why}");
            skipped += 1;
            continue;
        }
        if fallbacks > 0 {
            eprintln!(
                "note: {measure}: {fallbacks} of {} record(s) used the 0.5 fallback",
                records.len()
            );
        }

        let samples: Vec<ScoredSample> = scores
            .iter()
            .zip(&labels)
            .map(|(&value, &correct)| ScoredSample::new(value, correct))
            .collect();

        // Raw variant.
        let raw_report = report(&samples, config.scheme, config.bins)?;
        let raw_bins = bin_samples(&samples, config.scheme, config.bins)?;
        let raw_overlay = quantile_overlay(&samples, config.scheme);
        let raw_spec = PlotSpec::from_report(
            raw_bins,
            &raw_report,
            raw_overlay,
            format!("{measure} / {} (raw)", config.notion),
        );
        emit_reliability_plot(
            &raw_spec,
            &plots_dir.join(format!("{measure}_{}_raw.svg", config.notion)),
        )?;
        emit_roc_plot(
            &roc_points(&samples)?,
            raw_report.auc,
            &format!("{measure} / {} ROC", config.notion),
            &plots_dir.join(format!("{measure}_{}_roc.svg", config.notion)),
        )?;

        // Rescaled variant: cross-fitted so no sample is mapped by a model
        // that saw it during fitting.
        let rescaled_values =
            cross_fold_rescale_with(&samples, config.folds, config.seed, config.epsilon)?;
        let rescaled: Vec<ScoredSample> = rescaled_values
            .iter()
            .zip(&labels)
            .map(|(&value, &correct)| ScoredSample::new(value, correct))
            .collect();
        let mut scaled_report = report(&rescaled, config.scheme, config.bins)?;
        let (collapsed, reason) = detect_collapse(
            &rescaled_values,
            scaled_report.base_rate,
            scaled_report.skill,
            config.collapse_threshold,
        );
        if collapsed {
            let reason = reason.unwrap_or_else(|| "collapsed to the base rate".into());
            eprintln!("note: {measure} (rescaled): {reason}");
            scaled_report.omit_ece(reason);
        }
        let scaled_bins = bin_samples(&rescaled, config.scheme, config.bins)?;
        let scaled_overlay = quantile_overlay(&rescaled, config.scheme);
        let scaled_spec = PlotSpec::from_report(
            scaled_bins,
            &scaled_report,
            scaled_overlay,
            format!("{measure} / {} (rescaled)", config.notion),
        );
        emit_reliability_plot(
            &scaled_spec,
            &plots_dir.join(format!("{measure}_{}_rescaled.svg", config.notion)),
        )?;

        rows.push(ReportRow {
            measure,
            notion: config.notion,
            rescaled: false,
            report: raw_report,
        });
        rows.push(ReportRow {
            measure,
            notion: config.notion,
            rescaled: true,
            report: scaled_report,
        });
    }

    if rows.is_empty() {
        return Err(CliError::Data(format!(
            "all {skipped} requested measure(s) were skipped; nothing to report"
        )));
    }

    let table = render_report_table(&rows, config.format, config.full_precision);
    let report_path = config.out.join(match config.format {
        TableFormat::Markdown => "report.md",
        TableFormat::Csv => "report.csv",
    });
    write_text(&report_path, &table)?;
    print!("{table}");

    // The notion cross-tabulation needs both labels on every record.
    let both_labelable = records
        .iter()
        .all(|r| r.reference_text.is_some() && r.test_report.is_some());
    if both_labelable {
        let tab = cross_tab(&records)?;
        let (name, text) = match config.format {
            TableFormat::Markdown => ("crosstab.md", tab.to_markdown()),
            TableFormat::Csv => ("crosstab.csv", tab.to_csv()),
        };
        write_text(&config.out.join(name), &text)?;
    } else {
        eprintln!(
            "note: skipping the notion cross-tabulation: not every record carries \
             both reference_text and test_report"
        );
    }

    Ok(())
}

fn has_measure_field(record: &GenerationRecord, measure: Measure) -> bool {
    match measure {
        Measure::AvgProb | Measure::TotalProb => record.token_logprobs.is_some(),
        Measure::Verbalize => record.verbalized_responses.is_some(),
        Measure::AskTf | Measure::AskTfNorm => record.tf_response.is_some(),
        Measure::LengthBaseline => true,
    }
}

/// A 5-bin quantile view drawn over equal-width bars exposes miscalibration
/// that sparse tail bins would otherwise hide. Redundant when the primary
/// binning is already quantile.
fn quantile_overlay(
    samples: &[ScoredSample],
    scheme: BinningScheme,
) -> Option<codecal::metrics::ReliabilityBins> {
    match scheme {
        BinningScheme::EqualWidth => bin_samples(samples, BinningScheme::Quantile, 5).ok(),
        BinningScheme::Quantile => None,
    }
}

/// Generates a synthetic corpus with a known calibration profile and writes
/// it as JSONL.
pub fn cmd_synth(config: &SynthConfig) -> Result<(), CliError> {
    let records = synth_corpus(config.n, config.seed, config.profile);
    save_records(&config.out, &records)?;
    println!(
        "wrote {} record(s) with the {} profile (seed {}) to {}",
        config.n,
        config.profile,
        config.seed,
        config.out.display()
    );
    Ok(())
}
