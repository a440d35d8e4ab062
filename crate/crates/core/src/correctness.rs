//! Correctness notions and their cross-tabulation.
//!
//! A generation is "correct" under one of two notions: its text exactly
//! matches the reference solution, or it passes every test in its suite. The
//! two disagree often enough to matter, so [`CrossTab`] counts the 2×2 joint
//! distribution and renders it as a table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::records::{GenerationRecord, TestReport};

/// Which definition of "correct" a label was computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    ExactMatch,
    AllPass,
}

impl Notion {
    pub fn name(&self) -> &'static str {
        match self {
            Notion::ExactMatch => "exact_match",
            Notion::AllPass => "all_pass",
        }
    }

    /// Record field this notion needs.
    pub fn required_field(&self) -> &'static str {
        match self {
            Notion::ExactMatch => "reference_text",
            Notion::AllPass => "test_report",
        }
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Notion {
    type Err = CorrectnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "exact_match" => Ok(Notion::ExactMatch),
            "all_pass" => Ok(Notion::AllPass),
            _ => Err(CorrectnessError::UnknownNotion(s.to_string())),
        }
    }
}

/// Correctness verdict for one record under one notion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectnessLabel {
    pub notion: Notion,
    pub correct: bool,
}

#[derive(Debug, Error)]
pub enum CorrectnessError {
    #[error("record {record_id}: {field} missing, required for {notion}")]
    MissingField {
        record_id: String,
        field: &'static str,
        notion: Notion,
    },
    #[error("cannot cross-tabulate an empty corpus")]
    EmptyCorpus,
    #[error("unknown correctness notion {0:?} (expected exact_match or all_pass)")]
    UnknownNotion(String),
}

/// True iff the strings are identical after stripping leading/trailing
/// whitespace from each whole string. Internal whitespace stays significant:
/// a trailing newline is serialization noise, an extra space inside the line
/// is a different program.
pub fn exact_match(generated: &str, reference: &str) -> bool {
    generated.trim() == reference.trim()
}

/// True iff the generation parsed, nothing failed, and at least one test ran.
pub fn all_pass(report: &TestReport) -> bool {
    report.syntax_ok && report.failed == 0 && report.passed >= 1
}

/// Labels one record under the given notion, erroring if the record lacks
/// the field the notion needs.
pub fn label_record(
    record: &GenerationRecord,
    notion: Notion,
) -> Result<CorrectnessLabel, CorrectnessError> {
    let missing = || CorrectnessError::MissingField {
        record_id: record.record_id.clone(),
        field: notion.required_field(),
        notion,
    };
    let correct = match notion {
        Notion::ExactMatch => {
            let reference = record.reference_text.as_ref().ok_or_else(missing)?;
            exact_match(&record.generated_text, reference)
        }
        Notion::AllPass => {
            let report = record.test_report.as_ref().ok_or_else(missing)?;
            all_pass(report)
        }
    };
    Ok(CorrectnessLabel { notion, correct })
}

/// Joint distribution of the two correctness notions over a corpus.
///
/// `counts[em][ap]` holds the number of records with exact-match verdict `em`
/// and all-pass verdict `ap` (indexed false = 0, true = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossTab {
    counts: [[u64; 2]; 2],
    total: u64,
}

/// Counts every record into one of the four (exact-match, all-pass) cells.
/// Every record must carry both `reference_text` and `test_report`.
pub fn cross_tab(records: &[GenerationRecord]) -> Result<CrossTab, CorrectnessError> {
    if records.is_empty() {
        return Err(CorrectnessError::EmptyCorpus);
    }
    let mut counts = [[0u64; 2]; 2];
    for record in records {
        let em = label_record(record, Notion::ExactMatch)?.correct;
        let ap = label_record(record, Notion::AllPass)?.correct;
        counts[em as usize][ap as usize] += 1;
    }
    Ok(CrossTab {
        counts,
        total: records.len() as u64,
    })
}

impl CrossTab {
    pub fn count(&self, em: bool, ap: bool) -> u64 {
        self.counts[em as usize][ap as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Cell share of the corpus, in percent.
    pub fn percent(&self, em: bool, ap: bool) -> f64 {
        self.count(em, ap) as f64 / self.total as f64 * 100.0
    }

    /// Marginal exact-match rate for `em`, in percent.
    pub fn row_percent(&self, em: bool) -> f64 {
        let row = self.counts[em as usize][0] + self.counts[em as usize][1];
        row as f64 / self.total as f64 * 100.0
    }

    /// Marginal all-pass rate for `ap`, in percent.
    pub fn col_percent(&self, ap: bool) -> f64 {
        let col = self.counts[0][ap as usize] + self.counts[1][ap as usize];
        col as f64 / self.total as f64 * 100.0
    }

    /// Records that match the reference exactly yet fail tests — with a
    /// trustworthy reference these are likely flaky or environment-dependent
    /// suites, so they are worth surfacing separately.
    pub fn possible_flakes(&self) -> u64 {
        self.count(true, false)
    }

    /// Markdown table with all-pass columns, exact-match rows, and marginals.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("|                  | all pass: no | all pass: yes | total   |\n");
        out.push_str("|------------------|--------------|---------------|---------|\n");
        for em in [false, true] {
            let label = if em { "exact match: yes" } else { "exact match: no " };
            out.push_str(&format!(
                "| {} | {:>11.2}% | {:>12.2}% | {:>6.2}% |\n",
                label,
                self.percent(em, false),
                self.percent(em, true),
                self.row_percent(em),
            ));
        }
        out.push_str(&format!(
            "| total            | {:>11.2}% | {:>12.2}% | {:>6.2}% |\n",
            self.col_percent(false),
            self.col_percent(true),
            100.0,
        ));
        out
    }

    /// CSV rendering of the same layout (RFC 4180, no quoting needed here).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("exact_match,all_pass_no_pct,all_pass_yes_pct,total_pct\n");
        for em in [false, true] {
            out.push_str(&format!(
                "{},{:.2},{:.2},{:.2}\n",
                if em { "yes" } else { "no" },
                self.percent(em, false),
                self.percent(em, true),
                self.row_percent(em),
            ));
        }
        out.push_str(&format!(
            "total,{:.2},{:.2},{:.2}\n",
            self.col_percent(false),
            self.col_percent(true),
            100.0,
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::Task;

    #[test]
    fn exact_match_identity_and_trim() {
        assert!(exact_match("x = 1", "x = 1"));
        assert!(exact_match("x = 1\n", "x = 1"));
        assert!(exact_match("  x = 1  ", "x = 1"));
        assert!(!exact_match("x  = 1", "x = 1"));
    }

    #[test]
    fn exact_match_is_symmetric() {
        for (a, b) in [("a\n", "a"), ("a", "b"), ("  c", "c  ")] {
            assert_eq!(exact_match(a, b), exact_match(b, a));
        }
    }

    #[test]
    fn all_pass_requires_syntax_passes_and_a_test() {
        let ok = TestReport { passed: 5, failed: 0, syntax_ok: true };
        assert!(all_pass(&ok));
        let no_syntax = TestReport { passed: 0, failed: 0, syntax_ok: false };
        assert!(!all_pass(&no_syntax));
        let one_failure = TestReport { passed: 4, failed: 1, syntax_ok: true };
        assert!(!all_pass(&one_failure));
        let nothing_ran = TestReport { passed: 0, failed: 0, syntax_ok: true };
        assert!(!all_pass(&nothing_ran), "zero tests run is not a pass");
    }

    fn record(id: &str, em: bool, ap: bool) -> GenerationRecord {
        let generated = format!("fn f_{id}() {{}}");
        let reference = if em { generated.clone() } else { format!("fn g_{id}() {{}}") };
        let report = if ap {
            TestReport { passed: 3, failed: 0, syntax_ok: true }
        } else {
            TestReport { passed: 1, failed: 2, syntax_ok: true }
        };
        GenerationRecord {
            record_id: id.to_string(),
            task: Task::ProgramRepair,
            generated_length_chars: generated.chars().count(),
            generated_text: generated,
            token_logprobs: None,
            reference_text: Some(reference),
            test_report: Some(report),
            verbalized_responses: None,
            tf_response: None,
        }
    }

    #[test]
    fn label_record_under_both_notions() {
        let rec = record("r1", true, false);
        let em = label_record(&rec, Notion::ExactMatch).unwrap();
        assert!(em.correct);
        let ap = label_record(&rec, Notion::AllPass).unwrap();
        assert!(!ap.correct);
    }

    #[test]
    fn label_record_missing_field_names_record() {
        let mut rec = record("r9", true, true);
        rec.test_report = None;
        let err = label_record(&rec, Notion::AllPass).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("r9"), "message: {message}");
        assert!(message.contains("test_report"), "message: {message}");
    }

    #[test]
    fn cross_tab_single_record() {
        let tab = cross_tab(&[record("r1", true, true)]).unwrap();
        assert_eq!(tab.count(true, true), 1);
        assert_eq!(tab.total(), 1);
        assert_eq!(tab.count(false, false), 0);
    }

    #[test]
    fn cross_tab_one_record_per_cell() {
        let records = vec![
            record("a", false, false),
            record("b", false, true),
            record("c", true, false),
            record("d", true, true),
        ];
        let tab = cross_tab(&records).unwrap();
        for em in [false, true] {
            for ap in [false, true] {
                assert_eq!(tab.count(em, ap), 1);
                assert!((tab.percent(em, ap) - 25.0).abs() < 1e-12);
            }
        }
        assert_eq!(tab.possible_flakes(), 1);
    }

    #[test]
    fn cross_tab_empty_corpus_is_an_error() {
        assert!(matches!(cross_tab(&[]), Err(CorrectnessError::EmptyCorpus)));
    }

    #[test]
    fn cross_tab_missing_report_names_the_record() {
        let mut bad = record("r7", false, false);
        bad.test_report = None;
        let err = cross_tab(&[record("r1", true, true), bad]).unwrap_err();
        assert!(err.to_string().contains("r7"));
    }

    /// Corpus shaped like a published cross-tab: 10,000 records split
    /// 5989 / 1616 / 689 / 1706 across the four cells.
    fn large_fixture() -> CrossTab {
        let mut records = Vec::new();
        let cells = [(false, false, 5989), (false, true, 1616), (true, false, 689), (true, true, 1706)];
        let mut i = 0;
        for (em, ap, n) in cells {
            for _ in 0..n {
                records.push(record(&format!("r{i}"), em, ap));
                i += 1;
            }
        }
        cross_tab(&records).unwrap()
    }

    #[test]
    fn cross_tab_percentages_render_to_two_decimals() {
        let tab = large_fixture();
        let md = tab.to_markdown();
        for expected in ["59.89%", "16.16%", "6.89%", "17.06%", "66.78%", "33.22%", "100.00%"] {
            assert!(md.contains(expected), "missing {expected} in:\n{md}");
        }
        let csv = tab.to_csv();
        assert!(csv.contains("no,59.89,16.16,76.05"));
        assert!(csv.contains("yes,6.89,17.06,23.95"));
        assert!(csv.contains("total,66.78,33.22,100.00"));
    }

    #[test]
    fn cross_tab_marginals_are_consistent() {
        let tab = large_fixture();
        let cells: f64 = [(false, false), (false, true), (true, false), (true, true)]
            .iter()
            .map(|&(em, ap)| tab.percent(em, ap))
            .sum();
        assert!((cells - 100.0).abs() < 1e-9);
        assert!((tab.row_percent(false) + tab.row_percent(true) - 100.0).abs() < 1e-9);
        assert!((tab.col_percent(false) + tab.col_percent(true) - 100.0).abs() < 1e-9);
        assert!(
            (tab.row_percent(true) - (tab.percent(true, false) + tab.percent(true, true))).abs() < 1e-9
        );
        assert_eq!(tab.possible_flakes(), 689);
    }

    #[test]
    fn notion_names_round_trip() {
        assert_eq!("exact_match".parse::<Notion>().unwrap(), Notion::ExactMatch);
        assert_eq!("exact-match".parse::<Notion>().unwrap(), Notion::ExactMatch);
        assert_eq!("all_pass".parse::<Notion>().unwrap(), Notion::AllPass);
        assert_eq!("all-pass".parse::<Notion>().unwrap(), Notion::AllPass);
        assert!("plausible".parse::<Notion>().is_err());
    }
}
