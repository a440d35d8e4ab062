//! Synthetic corpora with known calibration properties, used as test
//! fixtures and demo inputs.
//!
//! Each record's drawn confidence `p` feeds every confidence field, with the
//! intrinsic route exact: the token log-probabilities are `ln p` repeated, so
//! the average-probability measure recovers `p` itself. Correctness labels
//! are then drawn per profile:
//!
//! * `calibrated` — Bernoulli(p): confidence means what it says.
//! * `overconfident` — Bernoulli(p²): the model is right less often than it
//!   claims, inflating ECE until rescaling fixes it.
//! * `uninformative` — Bernoulli(0.5) independent of p: no signal at all,
//!   the bucket-collapse case.
//!
//! Both correctness notions (exact match and all-pass) agree with the drawn
//! label, so the profile holds whichever notion an analysis picks. All
//! randomness comes from the pinned generator; a given `(n, seed, profile)`
//! always produces the identical corpus.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::records::{GenerationRecord, Task, TestReport, TfResponse, TokenCandidate};
use crate::rng::DetRng;

/// Label-generation profile for a synthetic corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthProfile {
    Calibrated,
    Overconfident,
    Uninformative,
}

impl SynthProfile {
    pub fn name(&self) -> &'static str {
        match self {
            SynthProfile::Calibrated => "calibrated",
            SynthProfile::Overconfident => "overconfident",
            SynthProfile::Uninformative => "uninformative",
        }
    }

    fn label_probability(&self, p: f64) -> f64 {
        match self {
            SynthProfile::Calibrated => p,
            SynthProfile::Overconfident => p * p,
            SynthProfile::Uninformative => 0.5,
        }
    }
}

impl fmt::Display for SynthProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SynthProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "calibrated" => Ok(SynthProfile::Calibrated),
            "overconfident" => Ok(SynthProfile::Overconfident),
            "uninformative" => Ok(SynthProfile::Uninformative),
            other => Err(format!(
                "unknown profile {other:?} (expected calibrated, overconfident, or uninformative)"
            )),
        }
    }
}

const TASKS: [Task; 3] = [
    Task::FunctionSynthesis,
    Task::LineCompletion,
    Task::ProgramRepair,
];

/// Generates `n` records under the profile. Fully deterministic: the per-
/// record draw order is pinned (confidence, label, token count, padding,
/// verbalized shape, then test-report shape), so changing it would break
/// recorded seeds.
pub fn synth_corpus(n: usize, seed: u64, profile: SynthProfile) -> Vec<GenerationRecord> {
    let mut rng = DetRng::new(seed);
    (0..n).map(|i| synth_record(i, &mut rng, profile)).collect()
}

fn synth_record(i: usize, rng: &mut DetRng, profile: SynthProfile) -> GenerationRecord {
    // Confidence, clamped away from 0 and 1 so every log-probability stays
    // finite (JSON cannot carry infinities).
    let p = rng.next_f64().clamp(1e-9, 1.0 - 1e-9);
    let correct = rng.next_bool(profile.label_probability(p));
    let token_count = 1 + rng.next_below(4) as usize;
    let pad = rng.next_below(120) as usize;
    let hesitates = rng.next_below(4) == 0;
    let unparseable = rng.next_below(50) == 0;

    let body = format!("fn item_{i}(x: i64) -> i64 {{ x + {i} }}");
    let generated_text = format!("{body} // {}", "~".repeat(pad + 1));
    let reference_text = if correct {
        generated_text.clone()
    } else {
        let alt = format!("fn item_{i}(x: i64) -> i64 {{ x - {i} }}");
        format!("{alt} // {}", "~".repeat(pad + 1))
    };

    let test_report = if correct {
        TestReport {
            passed: 1 + rng.next_below(8) as u32,
            failed: 0,
            syntax_ok: true,
        }
    } else if rng.next_below(10) == 0 {
        // Unparseable generation: every test counts as failing.
        TestReport {
            passed: 0,
            failed: 1 + rng.next_below(8) as u32,
            syntax_ok: false,
        }
    } else {
        TestReport {
            passed: rng.next_below(5) as u32,
            failed: 1 + rng.next_below(5) as u32,
            syntax_ok: true,
        }
    };

    let verbalized_responses = if unparseable {
        vec!["I cannot assess this one.".to_string()]
    } else if hesitates {
        vec![
            "Let me think about it.".to_string(),
            format!("I would say {:.2}%.", p * 100.0),
        ]
    } else {
        vec![format!("{:.2}%", p * 100.0)]
    };

    // True/false probe mirroring p, with candidates sorted by logprob.
    let q = p.clamp(0.01, 0.99);
    let mut candidates = vec![
        TokenCandidate {
            token: " True".to_string(),
            logprob: q.ln(),
        },
        TokenCandidate {
            token: " False".to_string(),
            logprob: (1.0 - q).ln(),
        },
    ];
    candidates.sort_by(|a, b| b.logprob.total_cmp(&a.logprob));

    GenerationRecord {
        record_id: format!("synth-{i:05}"),
        task: TASKS[i % TASKS.len()],
        generated_length_chars: generated_text.chars().count(),
        generated_text,
        token_logprobs: Some(vec![p.ln(); token_count]),
        reference_text: Some(reference_text),
        test_report: Some(test_report),
        verbalized_responses: Some(verbalized_responses),
        tf_response: Some(TfResponse {
            positions: vec![candidates],
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confidence::{score_record, CorpusLengthStats, Measure};
    use crate::correctness::{label_record, Notion};
    use crate::metrics::{auc_roc, bin_samples, ece, BinningScheme, ScoredSample};
    use crate::records::validate_record;
    use std::collections::HashSet;

    fn scored(records: &[GenerationRecord]) -> Vec<ScoredSample> {
        records
            .iter()
            .map(|r| {
                let confidence = score_record(r, Measure::AvgProb, None).unwrap().value;
                let correct = label_record(r, Notion::AllPass).unwrap().correct;
                ScoredSample::new(confidence, correct)
            })
            .collect()
    }

    #[test]
    fn corpora_are_deterministic_per_seed() {
        let a = synth_corpus(200, 7, SynthProfile::Calibrated);
        let b = synth_corpus(200, 7, SynthProfile::Calibrated);
        assert_eq!(a, b);
        let c = synth_corpus(200, 8, SynthProfile::Calibrated);
        assert_ne!(a, c, "different seeds must differ");
    }

    #[test]
    fn records_validate_cleanly_with_unique_ids() {
        for profile in [
            SynthProfile::Calibrated,
            SynthProfile::Overconfident,
            SynthProfile::Uninformative,
        ] {
            let records = synth_corpus(500, 1, profile);
            let mut ids = HashSet::new();
            for r in &records {
                let violations = validate_record(r);
                assert!(violations.is_empty(), "{}: {:?}", r.record_id, violations);
                assert!(ids.insert(r.record_id.clone()), "duplicate id {}", r.record_id);
            }
        }
    }

    #[test]
    fn every_measure_is_computable_on_synth_records() {
        let records = synth_corpus(150, 3, SynthProfile::Calibrated);
        let stats = CorpusLengthStats::from_records(&records).unwrap();
        for r in &records {
            for measure in Measure::ALL {
                let score = score_record(r, measure, Some(&stats)).unwrap();
                assert!((0.0..=1.0).contains(&score.value));
            }
        }
        assert!(stats.min_chars < stats.max_chars, "lengths must vary");
    }

    #[test]
    fn avg_prob_recovers_the_drawn_confidence() {
        let records = synth_corpus(100, 5, SynthProfile::Calibrated);
        for r in &records {
            let avg = score_record(r, Measure::AvgProb, None).unwrap().value;
            let verbalized = score_record(r, Measure::Verbalize, None).unwrap();
            if !verbalized.fallback_used {
                // Verbalized text carries p rounded to two percent decimals.
                assert!(
                    (avg - verbalized.value).abs() < 5e-5,
                    "avg {avg} vs verbalized {}",
                    verbalized.value
                );
            }
        }
    }

    #[test]
    fn calibrated_profile_is_roughly_calibrated() {
        let records = synth_corpus(10_000, 0, SynthProfile::Calibrated);
        let samples = scored(&records);
        let base_rate =
            samples.iter().filter(|s| s.correct).count() as f64 / samples.len() as f64;
        let mean_conf =
            samples.iter().map(|s| s.confidence).sum::<f64>() / samples.len() as f64;
        assert!(
            (base_rate - mean_conf).abs() < 0.03,
            "base rate {base_rate} vs mean confidence {mean_conf}"
        );
        let bins = bin_samples(&samples, BinningScheme::EqualWidth, 10).unwrap();
        let e = ece(&bins, samples.len());
        assert!(e < 0.03, "calibrated profile ECE {e} too large");
    }

    #[test]
    fn overconfident_profile_is_miscalibrated() {
        let records = synth_corpus(4000, 0, SynthProfile::Overconfident);
        let samples = scored(&records);
        let bins = bin_samples(&samples, BinningScheme::EqualWidth, 10).unwrap();
        let e = ece(&bins, samples.len());
        assert!(e > 0.1, "overconfident profile should show large ECE, got {e}");
        let base_rate =
            samples.iter().filter(|s| s.correct).count() as f64 / samples.len() as f64;
        assert!(
            (base_rate - 1.0 / 3.0).abs() < 0.05,
            "mean of p^2 over uniform p is 1/3, got {base_rate}"
        );
    }

    #[test]
    fn uninformative_profile_has_no_ranking_signal() {
        let records = synth_corpus(10_000, 0, SynthProfile::Uninformative);
        let samples = scored(&records);
        let auc = auc_roc(&samples).unwrap();
        assert!(
            (auc - 0.5).abs() < 0.02,
            "labels independent of p must give AUC ~ 0.5, got {auc}"
        );
    }

    #[test]
    fn profile_names_round_trip() {
        for profile in [
            SynthProfile::Calibrated,
            SynthProfile::Overconfident,
            SynthProfile::Uninformative,
        ] {
            assert_eq!(profile.name().parse::<SynthProfile>().unwrap(), profile);
        }
        assert!("perfect".parse::<SynthProfile>().is_err());
    }
}
