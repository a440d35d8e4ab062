//! Calibration metrics: reliability bins, ECE, Brier score and skill, AUC.
//!
//! Everything here consumes [`ScoredSample`]s — a confidence in `[0, 1]`
//! paired with a correctness label — and is a pure function of them, so the
//! same samples always produce the same report regardless of ordering
//! (reductions are sums and counts).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One scored generation: a confidence value and whether it was correct.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    pub confidence: f64,
    pub correct: bool,
}

impl ScoredSample {
    pub fn new(confidence: f64, correct: bool) -> Self {
        debug_assert!(
            (0.0..=1.0).contains(&confidence),
            "confidence out of range: {confidence}"
        );
        ScoredSample { confidence, correct }
    }
}

/// How samples are grouped into reliability bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinningScheme {
    /// `m` fixed-width bins over `[0, 1]`: bin `i` covers `[i/m, (i+1)/m)`,
    /// the last bin right-closed so confidence 1.0 is kept.
    EqualWidth,
    /// `m` equal-count bins over the sorted confidences; tie groups are never
    /// split, so counts may differ by up to the tie-group size.
    Quantile,
}

impl fmt::Display for BinningScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BinningScheme::EqualWidth => "equal_width",
            BinningScheme::Quantile => "quantile",
        })
    }
}

impl FromStr for BinningScheme {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "equal" | "equal_width" => Ok(BinningScheme::EqualWidth),
            "quantile" => Ok(BinningScheme::Quantile),
            _ => Err(MetricsError::UnknownScheme(s.to_string())),
        }
    }
}

/// One reliability bin: its confidence range, member count, mean confidence,
/// and fraction correct. Empty bins carry `conf = corr = 0` and zero weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub conf: f64,
    pub corr: f64,
}

/// Reliability binning of a sample set under one scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityBins {
    pub scheme: BinningScheme,
    pub m: usize,
    pub bins: Vec<Bin>,
}

impl ReliabilityBins {
    /// Total member count across bins (the sample size binned).
    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// Everything a calibration table row needs for one (measure, notion) pair.
///
/// `ece` is optional because a collapsed rescaling makes it misleading — one
/// full bucket at the base rate looks perfectly calibrated — in which case it
/// is omitted and `ece_omitted_reason` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub brier: f64,
    pub brier_ref: f64,
    pub skill: f64,
    pub ece: Option<f64>,
    pub auc: f64,
    pub base_rate: f64,
    pub n: usize,
    pub ece_omitted_reason: Option<String>,
}

impl CalibrationReport {
    /// Drops the ECE value, recording why. Used after collapse detection.
    pub fn omit_ece(&mut self, reason: String) {
        self.ece = None;
        self.ece_omitted_reason = Some(reason);
    }
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("metric undefined on an empty sample set")]
    EmptySamples,
    #[error("bin count must be >= 1")]
    InvalidBinCount,
    #[error("AUC undefined: corpus has only {0} samples")]
    SingleClass(&'static str),
    #[error("skill score undefined: reference Brier is 0 (degenerate base rate)")]
    DegenerateBaseRate,
    #[error("unknown binning scheme {0:?} (expected equal or quantile)")]
    UnknownScheme(String),
}

/// Groups samples into reliability bins under the given scheme.
pub fn bin_samples(
    samples: &[ScoredSample],
    scheme: BinningScheme,
    m: usize,
) -> Result<ReliabilityBins, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptySamples);
    }
    if m == 0 {
        return Err(MetricsError::InvalidBinCount);
    }
    let bins = match scheme {
        BinningScheme::EqualWidth => bin_equal_width(samples, m),
        BinningScheme::Quantile => bin_quantile(samples, m),
    };
    Ok(ReliabilityBins { scheme, m, bins })
}

fn bin_equal_width(samples: &[ScoredSample], m: usize) -> Vec<Bin> {
    let edges: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    let mut count = vec![0usize; m];
    let mut conf_sum = vec![0.0f64; m];
    let mut correct = vec![0usize; m];
    for s in samples {
        // Membership is decided against the edge values themselves, not by
        // flooring c*m: e.g. 0.7*10 rounds below 7, but 0.7 >= edges[7] puts
        // it in bin 7 where the half-open convention says it belongs.
        let c = s.confidence;
        let mut i = ((c * m as f64) as usize).min(m - 1);
        while i + 1 < m && c >= edges[i + 1] {
            i += 1;
        }
        while i > 0 && c < edges[i] {
            i -= 1;
        }
        count[i] += 1;
        conf_sum[i] += c;
        correct[i] += s.correct as usize;
    }
    (0..m)
        .map(|i| {
            let (conf, corr) = if count[i] > 0 {
                (conf_sum[i] / count[i] as f64, correct[i] as f64 / count[i] as f64)
            } else {
                (0.0, 0.0)
            };
            Bin {
                lo: edges[i],
                hi: edges[i + 1],
                count: count[i],
                conf,
                corr,
            }
        })
        .collect()
}

fn bin_quantile(samples: &[ScoredSample], m: usize) -> Vec<Bin> {
    let n = samples.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        samples[a]
            .confidence
            .total_cmp(&samples[b].confidence)
            .then(a.cmp(&b))
    });
    // Ideal cuts at i*n/m, each pushed forward past its tie group so equal
    // confidences always land in the lower bin together.
    let mut cuts = Vec::with_capacity(m + 1);
    cuts.push(0usize);
    for i in 1..m {
        let mut c = i * n / m;
        while c > 0 && c < n
            && samples[order[c]].confidence == samples[order[c - 1]].confidence
        {
            c += 1;
        }
        let prev = *cuts.last().unwrap();
        cuts.push(c.max(prev));
    }
    cuts.push(n);
    (0..m)
        .map(|i| {
            let members = &order[cuts[i]..cuts[i + 1]];
            if members.is_empty() {
                // Degenerate bin swallowed by a tie group: anchor it at the
                // confidence where its boundary fell.
                let anchor = samples[order[cuts[i].min(n - 1)]].confidence;
                return Bin { lo: anchor, hi: anchor, count: 0, conf: 0.0, corr: 0.0 };
            }
            let lo = samples[*members.first().unwrap()].confidence;
            let hi = samples[*members.last().unwrap()].confidence;
            let conf_sum: f64 = members.iter().map(|&j| samples[j].confidence).sum();
            let n_correct = members.iter().filter(|&&j| samples[j].correct).count();
            Bin {
                lo,
                hi,
                count: members.len(),
                conf: conf_sum / members.len() as f64,
                corr: n_correct as f64 / members.len() as f64,
            }
        })
        .collect()
}

/// Expected calibration error: the count-weighted mean absolute gap between
/// each bin's confidence and its fraction correct. `n` must equal the total
/// member count of `bins`.
pub fn ece(bins: &ReliabilityBins, n: usize) -> f64 {
    debug_assert_eq!(bins.total_count(), n, "ece called with mismatched n");
    bins.bins
        .iter()
        .filter(|b| b.count > 0)
        .map(|b| (b.count as f64 / n as f64) * (b.corr - b.conf).abs())
        .sum()
}

/// Brier score: mean squared error between confidence and the 0/1 label.
pub fn brier(samples: &[ScoredSample]) -> Result<f64, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptySamples);
    }
    let sum: f64 = samples
        .iter()
        .map(|s| {
            let target = s.correct as u8 as f64;
            (s.confidence - target).powi(2)
        })
        .sum();
    Ok(sum / samples.len() as f64)
}

/// Brier score of the unskilled reference predictor that always answers the
/// base rate: `r·(1 − r)`.
pub fn brier_ref(base_rate: f64) -> f64 {
    base_rate * (1.0 - base_rate)
}

/// Skill score: relative Brier improvement over the unskilled reference,
/// `(ref − actual)/ref`. 1 is perfect, 0 is no better than the base rate,
/// negative is worse. Undefined when the reference is 0 (all-correct or
/// all-incorrect corpus).
pub fn skill_score(brier_actual: f64, brier_ref_val: f64) -> Result<f64, MetricsError> {
    if brier_ref_val <= 0.0 {
        return Err(MetricsError::DegenerateBaseRate);
    }
    Ok((brier_ref_val - brier_actual) / brier_ref_val)
}

/// Area under the ROC curve: the probability that a uniformly random correct
/// sample is ranked above a uniformly random incorrect one, ties counted as
/// half. Computed by rank summation, which equals the trapezoidal area.
pub fn auc_roc(samples: &[ScoredSample]) -> Result<f64, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptySamples);
    }
    let n_pos = samples.iter().filter(|s| s.correct).count();
    let n_neg = samples.len() - n_pos;
    if n_pos == 0 {
        return Err(MetricsError::SingleClass("incorrect"));
    }
    if n_neg == 0 {
        return Err(MetricsError::SingleClass("correct"));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[a].confidence.total_cmp(&samples[b].confidence));
    // Average 1-based ranks within each tie group, then sum ranks of the
    // correct class (Mann-Whitney U).
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len()
            && samples[order[j]].confidence == samples[order[i]].confidence
        {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0; // mean of ranks i+1 ..= j
        rank_sum_pos += avg_rank
            * order[i..j].iter().filter(|&&k| samples[k].correct).count() as f64;
        i = j;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// ROC curve vertices as (false-positive rate, true-positive rate), from
/// (0, 0) to (1, 1), sweeping the decision threshold downward through the
/// distinct confidence values (tied confidences move diagonally in one step,
/// which is what gives ties their half credit under the trapezoid rule).
pub fn roc_points(samples: &[ScoredSample]) -> Result<Vec<(f64, f64)>, MetricsError> {
    let n_pos = samples.iter().filter(|s| s.correct).count();
    let n_neg = samples.len() - n_pos;
    if samples.is_empty() {
        return Err(MetricsError::EmptySamples);
    }
    if n_pos == 0 {
        return Err(MetricsError::SingleClass("incorrect"));
    }
    if n_neg == 0 {
        return Err(MetricsError::SingleClass("correct"));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[b].confidence.total_cmp(&samples[a].confidence));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len()
            && samples[order[j]].confidence == samples[order[i]].confidence
        {
            if samples[order[j]].correct {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
        i = j;
    }
    Ok(points)
}

/// Computes the full metric set for one scored sample list. Requires both
/// classes present (otherwise AUC and the skill reference are undefined).
pub fn report(
    samples: &[ScoredSample],
    scheme: BinningScheme,
    m: usize,
) -> Result<CalibrationReport, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptySamples);
    }
    let n = samples.len();
    let n_correct = samples.iter().filter(|s| s.correct).count();
    let base_rate = n_correct as f64 / n as f64;
    let brier_actual = brier(samples)?;
    let brier_reference = brier_ref(base_rate);
    let auc = auc_roc(samples)?;
    let skill = skill_score(brier_actual, brier_reference)?;
    let bins = bin_samples(samples, scheme, m)?;
    let ece_value = ece(&bins, n);
    Ok(CalibrationReport {
        brier: brier_actual,
        brier_ref: brier_reference,
        skill,
        ece: Some(ece_value),
        auc,
        base_rate,
        n,
        ece_omitted_reason: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(pairs: &[(f64, bool)]) -> Vec<ScoredSample> {
        pairs.iter().map(|&(c, y)| ScoredSample::new(c, y)).collect()
    }

    #[test]
    fn equal_width_keeps_point_mass_in_one_bin() {
        // 0.7 * 10 floors below 7 in f64; the edge comparison must fix it up.
        let s = samples(&[(0.7, true); 20]);
        let bins = bin_samples(&s, BinningScheme::EqualWidth, 10).unwrap();
        assert_eq!(bins.bins.len(), 10);
        assert_eq!(bins.bins[7].count, 20, "0.7 belongs to [0.7, 0.8)");
        assert_eq!(bins.total_count(), 20);
        assert!((bins.bins[7].lo - 0.7).abs() < 1e-15);
        assert!((bins.bins[7].conf - 0.7).abs() < 1e-15);
        assert_eq!(bins.bins[7].corr, 1.0);
    }

    #[test]
    fn equal_width_last_bin_is_right_closed() {
        let s = samples(&[(1.0, true), (0.999, false)]);
        let bins = bin_samples(&s, BinningScheme::EqualWidth, 10).unwrap();
        assert_eq!(bins.bins[9].count, 2, "confidence 1.0 must not be lost");
    }

    #[test]
    fn equal_width_boundaries_partition_unit_interval() {
        let s = samples(&[(0.0, false), (0.5, true)]);
        let bins = bin_samples(&s, BinningScheme::EqualWidth, 7).unwrap();
        assert_eq!(bins.bins[0].lo, 0.0);
        assert_eq!(bins.bins[6].hi, 1.0);
        for w in bins.bins.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
        }
    }

    #[test]
    fn quantile_splits_distinct_values_evenly() {
        let pairs: Vec<(f64, bool)> = (0..10).map(|i| (i as f64 / 10.0, i % 2 == 0)).collect();
        let bins = bin_samples(&samples(&pairs), BinningScheme::Quantile, 5).unwrap();
        assert_eq!(bins.bins.len(), 5);
        for bin in &bins.bins {
            assert_eq!(bin.count, 2, "expected five bins of exactly 2");
        }
        assert_eq!(bins.total_count(), 10);
    }

    #[test]
    fn quantile_keeps_tie_groups_together() {
        let mut pairs = vec![(0.5, true); 6];
        pairs.extend(vec![(0.9, false); 4]);
        let bins = bin_samples(&samples(&pairs), BinningScheme::Quantile, 2).unwrap();
        assert_eq!(bins.bins[0].count, 6, "tie group must stay in the lower bin");
        assert_eq!(bins.bins[1].count, 4);
    }

    #[test]
    fn quantile_all_tied_leaves_one_nonempty_bin() {
        let s = samples(&[(0.3, true); 9]);
        let bins = bin_samples(&s, BinningScheme::Quantile, 3).unwrap();
        assert_eq!(bins.bins[0].count, 9);
        assert_eq!(bins.bins[1].count, 0);
        assert_eq!(bins.bins[2].count, 0);
        assert_eq!(bins.total_count(), 9);
    }

    #[test]
    fn empty_samples_are_rejected() {
        assert!(matches!(
            bin_samples(&[], BinningScheme::EqualWidth, 10),
            Err(MetricsError::EmptySamples)
        ));
        assert!(matches!(
            bin_samples(&samples(&[(0.5, true)]), BinningScheme::EqualWidth, 0),
            Err(MetricsError::InvalidBinCount)
        ));
    }

    #[test]
    fn ece_of_perfect_bin_is_zero() {
        let s = samples(&[(0.7, true), (0.7, true), (0.7, false), (0.7, false), (0.7, true),
                          (0.7, true), (0.7, true), (0.7, false), (0.7, true), (0.7, true)]);
        // corr = 0.7 = conf exactly
        let bins = bin_samples(&s, BinningScheme::EqualWidth, 10).unwrap();
        let e = ece(&bins, s.len());
        assert!(e.abs() < 1e-12, "expected 0, got {e}");
    }

    #[test]
    fn ece_matches_two_bin_hand_sum() {
        // 4 samples at conf 0.2 with corr 0.5; 6 at conf 0.9 with corr 0.5:
        // 0.4*0.3 + 0.6*0.4 = 0.36.
        let mut pairs = vec![(0.2, true), (0.2, true), (0.2, false), (0.2, false)];
        pairs.extend([(0.9, true), (0.9, true), (0.9, true), (0.9, false), (0.9, false), (0.9, false)]);
        let s = samples(&pairs);
        let bins = bin_samples(&s, BinningScheme::EqualWidth, 10).unwrap();
        let e = ece(&bins, s.len());
        assert!((e - 0.36).abs() < 1e-12, "expected 0.36, got {e}");
    }

    #[test]
    fn ece_of_base_rate_predictor_is_near_zero() {
        // Constant predictor at the exact base rate: one bin, conf = corr.
        let mut pairs = vec![(0.3, true); 3];
        pairs.extend(vec![(0.3, false); 7]);
        let s = samples(&pairs);
        let bins = bin_samples(&s, BinningScheme::EqualWidth, 10).unwrap();
        assert!(ece(&bins, s.len()) < 1e-12);
    }

    #[test]
    fn ece_with_one_bin_is_base_rate_gap() {
        let s = samples(&[(0.9, true), (0.6, false), (0.8, true), (0.7, false)]);
        let bins = bin_samples(&s, BinningScheme::EqualWidth, 1).unwrap();
        let mean_conf: f64 = (0.9 + 0.6 + 0.8 + 0.7) / 4.0;
        let expected = (0.5 - mean_conf).abs();
        let e = ece(&bins, 4);
        assert!((e - expected).abs() < 1e-12, "expected {expected}, got {e}");
    }

    #[test]
    fn brier_of_perfect_predictor_is_zero() {
        let s = samples(&[(1.0, true), (0.0, false), (1.0, true)]);
        assert_eq!(brier(&s).unwrap(), 0.0);
    }

    #[test]
    fn brier_of_coinflip_predictor_is_quarter() {
        let s = samples(&[(0.5, true), (0.5, false)]);
        let b = brier(&s).unwrap();
        assert!((b - 0.25).abs() < 1e-15, "expected 0.25, got {b}");
    }

    #[test]
    fn brier_hand_example() {
        let s = samples(&[(0.8, true), (0.4, false)]);
        let b = brier(&s).unwrap();
        assert!((b - 0.10).abs() < 1e-12, "expected 0.10, got {b}");
    }

    #[test]
    fn brier_of_exact_base_rate_predictor_equals_reference() {
        // 3 of 10 correct, constant confidence 0.3: Brier = 0.3*0.7 exactly.
        let mut pairs = vec![(0.3, true); 3];
        pairs.extend(vec![(0.3, false); 7]);
        let b = brier(&samples(&pairs)).unwrap();
        assert!((b - brier_ref(0.3)).abs() < 1e-15, "expected {}, got {b}", brier_ref(0.3));
    }

    #[test]
    fn brier_ref_values() {
        assert_eq!(brier_ref(0.5), 0.25);
        assert!((brier_ref(0.72) - 0.2016).abs() < 1e-12);
        assert_eq!(brier_ref(0.0), 0.0);
        assert_eq!(brier_ref(1.0), 0.0);
    }

    #[test]
    fn skill_score_endpoints() {
        assert_eq!(skill_score(0.25, 0.25).unwrap(), 0.0);
        assert_eq!(skill_score(0.0, 0.25).unwrap(), 1.0);
        let s = skill_score(0.20, 0.25).unwrap();
        assert!((s - 0.2).abs() < 1e-12, "expected 0.2, got {s}");
        assert!(matches!(
            skill_score(0.1, 0.0),
            Err(MetricsError::DegenerateBaseRate)
        ));
    }

    #[test]
    fn auc_of_perfect_separation_is_one() {
        let s = samples(&[(0.9, true), (0.8, true), (0.2, false), (0.1, false)]);
        let a = auc_roc(&s).unwrap();
        assert!((a - 1.0).abs() < 1e-12, "expected 1.0, got {a}");
    }

    #[test]
    fn auc_of_reversed_separation_is_zero() {
        let s = samples(&[(0.1, true), (0.9, false)]);
        let a = auc_roc(&s).unwrap();
        assert!(a.abs() < 1e-12, "expected 0.0, got {a}");
    }

    #[test]
    fn auc_of_all_ties_is_half() {
        let s = samples(&[(0.4, true), (0.4, false), (0.4, true), (0.4, false)]);
        let a = auc_roc(&s).unwrap();
        assert!((a - 0.5).abs() < 1e-12, "expected 0.5, got {a}");
    }

    #[test]
    fn auc_matches_pair_counting_oracle_on_six_samples() {
        let s = samples(&[(0.9, true), (0.7, false), (0.7, true), (0.4, true), (0.3, false), (0.1, false)]);
        let a = auc_roc(&s).unwrap();
        // Exhaustive (correct, incorrect) pair count with half-credit ties.
        let mut score = 0.0;
        let mut pairs = 0u32;
        for pos in s.iter().filter(|x| x.correct) {
            for neg in s.iter().filter(|x| !x.correct) {
                pairs += 1;
                if pos.confidence > neg.confidence {
                    score += 1.0;
                } else if pos.confidence == neg.confidence {
                    score += 0.5;
                }
            }
        }
        let oracle = score / pairs as f64;
        assert!((a - oracle).abs() < 1e-12, "rank-sum {a} vs oracle {oracle}");
    }

    #[test]
    fn roc_points_trapezoid_area_equals_rank_sum_auc() {
        let s = samples(&[
            (0.95, true), (0.9, false), (0.8, true), (0.8, false), (0.6, true),
            (0.5, false), (0.5, true), (0.3, false), (0.2, true), (0.1, false),
        ]);
        let points = roc_points(&s).unwrap();
        assert_eq!(*points.first().unwrap(), (0.0, 0.0));
        assert_eq!(*points.last().unwrap(), (1.0, 1.0));
        let trapezoid: f64 = points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum();
        let a = auc_roc(&s).unwrap();
        assert!(
            (trapezoid - a).abs() < 1e-12,
            "trapezoid {trapezoid} vs rank-sum {a}"
        );
    }

    #[test]
    fn auc_rejects_single_class() {
        let s = samples(&[(0.9, true), (0.5, true)]);
        assert!(matches!(auc_roc(&s), Err(MetricsError::SingleClass(_))));
    }

    #[test]
    fn report_on_perfect_corpus() {
        let s = samples(&[(1.0, true), (1.0, true), (0.0, false)]);
        let r = report(&s, BinningScheme::EqualWidth, 10).unwrap();
        assert_eq!(r.brier, 0.0);
        assert_eq!(r.skill, 1.0);
        assert_eq!(r.auc, 1.0);
        assert_eq!(r.ece, Some(0.0));
        assert_eq!(r.n, 3);
        assert!((r.base_rate - 2.0 / 3.0).abs() < 1e-15);
        assert!(r.ece_omitted_reason.is_none());
    }

    #[test]
    fn report_on_unskilled_corpus() {
        // Constant base-rate predictor: skill 0, ECE ~ 0, AUC 0.5.
        let mut pairs = vec![(0.4, true); 4];
        pairs.extend(vec![(0.4, false); 6]);
        let r = report(&samples(&pairs), BinningScheme::EqualWidth, 10).unwrap();
        assert!(r.skill.abs() < 1e-12, "expected skill 0, got {}", r.skill);
        assert!(r.ece.unwrap() < 1e-12);
        assert!((r.auc - 0.5).abs() < 1e-12);
        assert!((r.base_rate - 0.4).abs() < 1e-15);
    }

    #[test]
    fn report_skill_identity_holds() {
        let s = samples(&[(0.9, true), (0.8, true), (0.3, false), (0.6, true), (0.2, false)]);
        let r = report(&s, BinningScheme::EqualWidth, 10).unwrap();
        let expected = (r.brier_ref - r.brier) / r.brier_ref;
        assert!((r.skill - expected).abs() < 1e-15);
    }

    #[test]
    fn omit_ece_clears_value_and_records_reason() {
        let s = samples(&[(0.6, true), (0.4, false)]);
        let mut r = report(&s, BinningScheme::EqualWidth, 10).unwrap();
        r.omit_ece("collapsed".to_string());
        assert_eq!(r.ece, None);
        assert_eq!(r.ece_omitted_reason.as_deref(), Some("collapsed"));
    }

    #[test]
    fn scheme_names_parse() {
        assert_eq!("equal".parse::<BinningScheme>().unwrap(), BinningScheme::EqualWidth);
        assert_eq!("equal-width".parse::<BinningScheme>().unwrap(), BinningScheme::EqualWidth);
        assert_eq!("quantile".parse::<BinningScheme>().unwrap(), BinningScheme::Quantile);
        assert!("adaptive".parse::<BinningScheme>().is_err());
    }
}
