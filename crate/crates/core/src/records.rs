//! Record schema, JSONL loading/saving, and per-record validation.
//!
//! A corpus is a JSON Lines file: one self-contained record object per line.
//! Loading is strict about structure (a malformed line or a duplicate
//! `record_id` is an error, never silently skipped) but tolerant of unknown
//! fields, which are counted so callers can surface a warning.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Task family the generation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    FunctionSynthesis,
    LineCompletion,
    ProgramRepair,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Task::FunctionSynthesis => "function_synthesis",
            Task::LineCompletion => "line_completion",
            Task::ProgramRepair => "program_repair",
        };
        f.write_str(name)
    }
}

/// Outcome of running the generated code against its test suite.
///
/// When the generation does not parse (`syntax_ok == false`) no test can
/// actually run, so every test is reported as failing and `passed` must be 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestReport {
    pub passed: u32,
    pub failed: u32,
    pub syntax_ok: bool,
}

/// One candidate token at one sampled position, with its log-probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenCandidate {
    pub token: String,
    pub logprob: f64,
}

/// Response to the true/false self-assessment probe.
///
/// `positions` holds, for each of the first answer positions, the top
/// candidate tokens sorted by descending log-probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfResponse {
    pub positions: Vec<Vec<TokenCandidate>>,
}

/// One model generation plus everything needed to score it.
///
/// Only `record_id`, `task`, `generated_text`, and `generated_length_chars`
/// are mandatory: each optional field unlocks the confidence measures or
/// correctness notions that depend on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub record_id: String,
    pub task: Task,
    pub generated_text: String,
    /// Log-probability of each sampled token of the generation, in order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_logprobs: Option<Vec<f64>>,
    /// Known-good solution text, required for exact-match correctness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_text: Option<String>,
    /// Test-suite outcome, required for all-pass correctness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_report: Option<TestReport>,
    /// Raw texts of the model's verbalized confidence answers, in retry order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verbalized_responses: Option<Vec<String>>,
    /// True/false probe response, required for the ask-style measures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tf_response: Option<TfResponse>,
    /// Length of `generated_text` in characters (not bytes).
    pub generated_length_chars: usize,
}

/// Result of loading a corpus: the records plus a count of unknown JSON keys
/// encountered anywhere in the file (schema drift signal, not an error).
#[derive(Debug)]
pub struct LoadOutcome {
    pub records: Vec<GenerationRecord>,
    pub unknown_field_count: usize,
}

/// Errors from loading or saving a corpus.
#[derive(Debug, Error)]
pub enum RecordError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: duplicate record_id {id:?} on lines {first} and {second}")]
    DuplicateId {
        path: PathBuf,
        id: String,
        first: usize,
        second: usize,
    },
}

/// Loads a JSONL corpus. Blank lines are ignored; anything else must parse as
/// a complete record. Duplicate `record_id`s are an error naming both lines.
pub fn load_records(path: &Path) -> Result<LoadOutcome, RecordError> {
    let text = fs::read_to_string(path).map_err(|source| RecordError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    let mut unknown_field_count = 0;
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(raw).map_err(|e| RecordError::MalformedLine {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            })?;
        unknown_field_count += count_unknown_fields(&value);
        let record: GenerationRecord =
            serde_json::from_value(value).map_err(|e| RecordError::MalformedLine {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            })?;
        if let Some(&first) = seen.get(&record.record_id) {
            return Err(RecordError::DuplicateId {
                path: path.to_path_buf(),
                id: record.record_id,
                first,
                second: line,
            });
        }
        seen.insert(record.record_id.clone(), line);
        records.push(record);
    }
    Ok(LoadOutcome {
        records,
        unknown_field_count,
    })
}

/// Writes records as JSONL, one object per line, omitting absent optionals.
/// Loading the result yields records equal to the input.
pub fn save_records(path: &Path, records: &[GenerationRecord]) -> Result<(), RecordError> {
    let io_err = |source| RecordError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = Vec::new();
    for record in records {
        // Only I/O can fail here: the schema contains no non-string map keys
        // and validation keeps floats finite.
        serde_json::to_writer(&mut out, record).expect("record serialization cannot fail");
        out.push(b'\n');
    }
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(&out).map_err(io_err)
}

/// Counts keys not in the schema, recursing into the nested objects.
fn count_unknown_fields(value: &serde_json::Value) -> usize {
    const RECORD_KEYS: [&str; 9] = [
        "record_id",
        "task",
        "generated_text",
        "token_logprobs",
        "reference_text",
        "test_report",
        "verbalized_responses",
        "tf_response",
        "generated_length_chars",
    ];
    let Some(map) = value.as_object() else {
        return 0;
    };
    let mut count = map.keys().filter(|k| !RECORD_KEYS.contains(&k.as_str())).count();
    if let Some(report) = map.get("test_report").and_then(|v| v.as_object()) {
        count += report
            .keys()
            .filter(|k| !["passed", "failed", "syntax_ok"].contains(&k.as_str()))
            .count();
    }
    if let Some(tf) = map.get("tf_response").and_then(|v| v.as_object()) {
        count += tf.keys().filter(|k| k.as_str() != "positions").count();
        let positions = tf.get("positions").and_then(|v| v.as_array());
        for position in positions.into_iter().flatten() {
            for candidate in position.as_array().into_iter().flatten() {
                if let Some(obj) = candidate.as_object() {
                    count += obj
                        .keys()
                        .filter(|k| !["token", "logprob"].contains(&k.as_str()))
                        .count();
                }
            }
        }
    }
    count
}

/// One broken invariant found by [`validate_record`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Schema field the problem was found in.
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn violation(field: &str, message: String) -> Violation {
    Violation {
        field: field.to_string(),
        message,
    }
}

/// Checks the semantic invariants of a record, returning every violation
/// found (empty means valid):
///
/// * token log-probabilities are finite and `<= 0`
/// * `generated_length_chars` equals the character count of `generated_text`
/// * a test report with `syntax_ok == false` has `passed == 0`
/// * probe candidates per position are sorted by descending log-probability,
///   with finite log-probabilities `<= 0`
pub fn validate_record(record: &GenerationRecord) -> Vec<Violation> {
    let mut violations = Vec::new();
    if let Some(logprobs) = &record.token_logprobs {
        for (i, &lp) in logprobs.iter().enumerate() {
            if !lp.is_finite() || lp > 0.0 {
                violations.push(violation(
                    "token_logprobs",
                    format!("element {i} is {lp}, expected a finite log-probability <= 0"),
                ));
            }
        }
    }
    let actual_chars = record.generated_text.chars().count();
    if record.generated_length_chars != actual_chars {
        violations.push(violation(
            "generated_length_chars",
            format!(
                "declared {} but generated_text has {} chars",
                record.generated_length_chars, actual_chars
            ),
        ));
    }
    if let Some(report) = &record.test_report {
        if !report.syntax_ok && report.passed > 0 {
            violations.push(violation(
                "test_report",
                format!(
                    "syntax_ok is false but passed = {}; nothing can pass when the code does not parse",
                    report.passed
                ),
            ));
        }
    }
    if let Some(tf) = &record.tf_response {
        for (pos, candidates) in tf.positions.iter().enumerate() {
            for (i, candidate) in candidates.iter().enumerate() {
                let lp = candidate.logprob;
                if !lp.is_finite() || lp > 0.0 {
                    violations.push(violation(
                        "tf_response",
                        format!(
                            "position {pos} candidate {i} has logprob {lp}, expected finite and <= 0"
                        ),
                    ));
                }
            }
            if candidates
                .windows(2)
                .any(|w| w[0].logprob < w[1].logprob)
            {
                violations.push(violation(
                    "tf_response",
                    format!("position {pos} candidates are not sorted by descending logprob"),
                ));
            }
        }
    }
    violations
}
