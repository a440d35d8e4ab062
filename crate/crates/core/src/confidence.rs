//! Confidence measures computed per record, each yielding a value in `[0, 1]`.
//!
//! Two intrinsic measures come straight from the generator's token
//! log-probabilities (their arithmetic-mean probability and their product),
//! two reflective measures come from re-prompting the model about its own
//! output (a verbalized percentage and a true/false probe), and a length
//! baseline anchors the comparison: shorter generations score higher.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::records::{GenerationRecord, TfResponse};

/// The confidence measures this crate knows how to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Arithmetic mean of per-token probabilities.
    AvgProb,
    /// Product of per-token probabilities (summed in log space).
    TotalProb,
    /// Numeric confidence parsed out of the model's verbalized answer.
    Verbalize,
    /// Probability the probe assigned to a "true" token.
    AskTf,
    /// "true" probability normalized by the true+false mass.
    AskTfNorm,
    /// Linear length baseline: shortest generation scores 1, longest 0.
    LengthBaseline,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::AvgProb,
        Measure::TotalProb,
        Measure::Verbalize,
        Measure::AskTf,
        Measure::AskTfNorm,
        Measure::LengthBaseline,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::AvgProb => "avg_prob",
            Measure::TotalProb => "total_prob",
            Measure::Verbalize => "verbalize",
            Measure::AskTf => "ask_tf",
            Measure::AskTfNorm => "ask_tf_norm",
            Measure::LengthBaseline => "length_baseline",
        }
    }

    /// Record field the measure needs, for error messages and availability
    /// checks. `length_baseline` uses the always-present length field.
    pub fn required_field(&self) -> &'static str {
        match self {
            Measure::AvgProb | Measure::TotalProb => "token_logprobs",
            Measure::Verbalize => "verbalized_responses",
            Measure::AskTf | Measure::AskTfNorm => "tf_response",
            Measure::LengthBaseline => "generated_length_chars",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = ConfidenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "avg_prob" => Ok(Measure::AvgProb),
            "total_prob" => Ok(Measure::TotalProb),
            "verbalize" => Ok(Measure::Verbalize),
            "ask_tf" => Ok(Measure::AskTf),
            "ask_tf_norm" => Ok(Measure::AskTfNorm),
            "length_baseline" => Ok(Measure::LengthBaseline),
            _ => Err(ConfidenceError::UnknownMeasure(s.to_string())),
        }
    }
}

/// A computed confidence value for one record under one measure.
///
/// `fallback_used` is true only when a defaulting rule produced the value:
/// verbalized retries exhausted, or the true/false token scan came up empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceScore {
    pub measure: Measure,
    pub value: f64,
    pub fallback_used: bool,
}

/// Corpus-wide generation-length extremes, needed by the length baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusLengthStats {
    pub min_chars: usize,
    pub max_chars: usize,
}

impl CorpusLengthStats {
    /// Scans a corpus for its length extremes. Errors on an empty corpus.
    pub fn from_records(records: &[GenerationRecord]) -> Result<Self, ConfidenceError> {
        let mut lengths = records.iter().map(|r| r.generated_length_chars);
        let first = lengths.next().ok_or(ConfidenceError::EmptyCorpus)?;
        let (mut min_chars, mut max_chars) = (first, first);
        for len in lengths {
            min_chars = min_chars.min(len);
            max_chars = max_chars.max(len);
        }
        Ok(CorpusLengthStats {
            min_chars,
            max_chars,
        })
    }
}

#[derive(Debug, Error)]
pub enum ConfidenceError {
    #[error("token_logprobs is empty; the mean/product of zero tokens is undefined")]
    EmptyLogprobs,
    #[error("tf_response has no candidates to scan")]
    EmptyTfResponse,
    #[error("cannot compute length stats for an empty corpus")]
    EmptyCorpus,
    #[error("measure {measure} requires field {field}, which is missing")]
    MissingField { measure: Measure, field: &'static str },
    #[error("unknown measure {0:?} (expected one of avg_prob, total_prob, verbalize, ask_tf, ask_tf_norm, length_baseline)")]
    UnknownMeasure(String),
}

/// Arithmetic mean of the per-token probabilities `exp(logprob_i)`.
pub fn avg_token_probability(logprobs: &[f64]) -> Result<f64, ConfidenceError> {
    if logprobs.is_empty() {
        return Err(ConfidenceError::EmptyLogprobs);
    }
    let sum: f64 = logprobs.iter().map(|&lp| lp.exp()).sum();
    Ok(sum / logprobs.len() as f64)
}

/// Product of the per-token probabilities, i.e. the probability of the whole
/// sequence. The log-probabilities are summed before a single `exp`, so a
/// 500-token sequence at p = 0.9 per token lands near 1.3e-23 instead of
/// underflowing through repeated multiplication of small intermediates.
pub fn total_sequence_probability(logprobs: &[f64]) -> Result<f64, ConfidenceError> {
    if logprobs.is_empty() {
        return Err(ConfidenceError::EmptyLogprobs);
    }
    Ok(logprobs.iter().sum::<f64>().exp())
}

fn number_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"-?\d+(?:\.\d+)?\s*%?").expect("static regex"))
}

/// Extracts a confidence from the model's verbalized answers, scanning the
/// retry sequence in order; the first response that yields a probability
/// wins, and `(0.5, true)` is returned when none does.
///
/// Within a response, percent-suffixed numbers ("80%", "80.00 %") take
/// precedence over bare ones. A bare number is read on the percent scale when
/// it is greater than 1 ("about 80." → 0.8) and as a probability when it is
/// at most 1 ("0.8" → 0.8). Candidates outside [0, 100] are rejected rather
/// than clamped.
pub fn parse_verbalized(responses: &[String]) -> (f64, bool) {
    for response in responses {
        if let Some(value) = parse_one_response(response) {
            return (value, false);
        }
    }
    (0.5, true)
}

fn parse_one_response(response: &str) -> Option<f64> {
    let mut bare_candidate = None;
    for m in number_regex().find_iter(response) {
        let text = m.as_str();
        let is_percent = text.ends_with('%');
        let digits = text.trim_end_matches('%').trim_end();
        let number: f64 = digits.parse().ok()?;
        if !(0.0..=100.0).contains(&number) {
            continue;
        }
        if is_percent {
            return Some(number / 100.0);
        }
        if bare_candidate.is_none() {
            let value = if number > 1.0 { number / 100.0 } else { number };
            bare_candidate = Some(value);
        }
    }
    bare_candidate
}

/// Reads the true/false probe: converts each candidate's log-probability to a
/// probability by exponentiation (the candidates come from the model's
/// already-normalized token distribution, so a truncated list is not
/// renormalized), then takes the highest-probability candidate whose text
/// contains "true" and the highest containing "false" — case-insensitive
/// substring match after trimming, across all positions.
///
/// The raw variant returns p(true); the normalized variant returns
/// p(true) / (p(true) + p(false)). With no "true" candidate anywhere the
/// result is the `(0.5, true)` fallback; a normalized request that finds
/// "true" but no "false" falls back to the raw value with `fallback_used`.
pub fn ask_tf_probability(resp: &TfResponse, normalized: bool) -> Result<(f64, bool), ConfidenceError> {
    if resp.positions.iter().all(|p| p.is_empty()) {
        return Err(ConfidenceError::EmptyTfResponse);
    }
    let mut p_true: Option<f64> = None;
    let mut p_false: Option<f64> = None;
    for position in &resp.positions {
        for candidate in position {
            let token = candidate.token.trim().to_lowercase();
            let p = candidate.logprob.exp();
            if token.contains("true") {
                p_true = Some(p_true.map_or(p, |best: f64| best.max(p)));
            }
            if token.contains("false") {
                p_false = Some(p_false.map_or(p, |best: f64| best.max(p)));
            }
        }
    }
    let Some(p_true) = p_true else {
        return Ok((0.5, true));
    };
    if !normalized {
        return Ok((p_true, false));
    }
    match p_false {
        Some(p_false) => Ok((p_true / (p_true + p_false), false)),
        None => Ok((p_true, true)),
    }
}

/// Linear length baseline: a generation as short as the corpus minimum gets
/// confidence 1, one as long as the maximum gets 0. Degenerate corpora where
/// every generation has the same length score 1.0 (everything is "shortest").
pub fn length_baseline(len_chars: usize, stats: &CorpusLengthStats) -> f64 {
    if stats.max_chars == stats.min_chars {
        return 1.0;
    }
    let span = (stats.max_chars - stats.min_chars) as f64;
    let above_min = len_chars.saturating_sub(stats.min_chars) as f64;
    (1.0 - above_min / span).clamp(0.0, 1.0)
}

/// Computes `measure` for one record, erroring when the record lacks the
/// field the measure needs (`stats` is required for `length_baseline`).
pub fn score_record(
    record: &GenerationRecord,
    measure: Measure,
    stats: Option<&CorpusLengthStats>,
) -> Result<ConfidenceScore, ConfidenceError> {
    let missing = || ConfidenceError::MissingField {
        measure,
        field: measure.required_field(),
    };
    let (value, fallback_used) = match measure {
        Measure::AvgProb => {
            let logprobs = record.token_logprobs.as_ref().ok_or_else(missing)?;
            (avg_token_probability(logprobs)?, false)
        }
        Measure::TotalProb => {
            let logprobs = record.token_logprobs.as_ref().ok_or_else(missing)?;
            (total_sequence_probability(logprobs)?, false)
        }
        Measure::Verbalize => {
            let responses = record.verbalized_responses.as_ref().ok_or_else(missing)?;
            parse_verbalized(responses)
        }
        Measure::AskTf => {
            let resp = record.tf_response.as_ref().ok_or_else(missing)?;
            ask_tf_probability(resp, false)?
        }
        Measure::AskTfNorm => {
            let resp = record.tf_response.as_ref().ok_or_else(missing)?;
            ask_tf_probability(resp, true)?
        }
        Measure::LengthBaseline => {
            let stats = stats.ok_or(ConfidenceError::MissingField {
                measure,
                field: "corpus length stats",
            })?;
            (length_baseline(record.generated_length_chars, stats), false)
        }
    };
    debug_assert!((0.0..=1.0).contains(&value), "{measure} out of range: {value}");
    Ok(ConfidenceScore {
        measure,
        value,
        fallback_used,
    })
}
