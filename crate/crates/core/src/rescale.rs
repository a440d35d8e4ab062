//! Platt rescaling of confidence scores, with k-fold cross-fitting and
//! bucket-collapse detection.
//!
//! A logistic regression maps the log of each confidence to the observed
//! correctness rate: `σ(slope · ln(clamp(p, ε, 1−ε)) + intercept)`. To keep
//! the evaluation honest, [`cross_fold_rescale`] fits on k−1 folds and scores
//! the held-out fold, so no sample is ever rescaled by a model that saw it.
//!
//! Rescaling a signal-free measure squishes every estimate to the base rate,
//! which *looks* perfectly calibrated (one full bucket, near-zero ECE).
//! [`detect_collapse`] flags that case so downstream reports can omit the
//! ECE instead of presenting it as a success.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::ScoredSample;
use crate::rng::DetRng;

/// Clamping floor keeping `ln p` finite at p = 0 and p = 1.
pub const DEFAULT_EPSILON: f64 = 1e-9;
/// Fold count used when none is configured.
pub const DEFAULT_FOLDS: usize = 5;
/// Skill threshold below which a rescaled measure counts as collapsed.
pub const DEFAULT_COLLAPSE_THRESHOLD: f64 = 0.05;

const L2_PENALTY: f64 = 1e-6;
const GRAD_TOL: f64 = 1e-8;
const MAX_ITERATIONS: usize = 100;

/// Input transformation the logistic regression is fit on.
///
/// Only `ln_prob` is implemented — the natural log of the confidence — but
/// the choice is carried as data so fitted models are self-describing and a
/// log-odds feature could be compared side by side later.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    LnProb,
}

/// A fitted rescaling map `p -> σ(slope · feature(p) + intercept)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattModel {
    pub slope: f64,
    pub intercept: f64,
    pub feature: Feature,
    pub epsilon: f64,
}

/// Deterministic partition of `n` samples into `k` folds.
///
/// Indices are shuffled by the seeded generator and dealt round-robin, so
/// fold sizes differ by at most one and the assignment depends only on
/// `(n, k, seed)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// `assignment[i]` is the fold id (in `0..k`) of sample `i`.
    pub assignment: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn new(n: usize, k: usize, seed: u64) -> Result<Self, RescaleError> {
        if k < 2 || k > n {
            return Err(RescaleError::InvalidFolds { k, n });
        }
        let mut order: Vec<usize> = (0..n).collect();
        DetRng::new(seed).shuffle(&mut order);
        let mut assignment = vec![0usize; n];
        for (position, &sample) in order.iter().enumerate() {
            assignment[sample] = position % k;
        }
        Ok(FoldPlan { k, assignment, seed })
    }

    /// Indices held out in fold `f`.
    pub fn held_out(&self, f: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == f)
            .collect()
    }

    /// Indices trained on for fold `f` (everything not held out).
    pub fn training(&self, f: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != f)
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum RescaleError {
    #[error("cannot fit a rescaler on a single-class sample set")]
    SingleClass,
    #[error("cannot fit a rescaler on {n} samples (minimum 10)")]
    TooFewSamples { n: usize },
    #[error("epsilon {0} out of range; need 0 < epsilon < 0.5")]
    InvalidEpsilon(f64),
    #[error("invalid fold count k={k} for {n} samples (need 2 <= k <= n)")]
    InvalidFolds { k: usize, n: usize },
    #[error("fold {fold}: training split contains only one correctness class")]
    FoldMissingClass { fold: usize },
    #[error(
        "rescaling fit did not converge after {iterations} iterations \
         (gradient norm {grad_norm:.3e}, last iterate slope {slope:.6}, intercept {intercept:.6})"
    )]
    NoConvergence {
        iterations: usize,
        grad_norm: f64,
        slope: f64,
        intercept: f64,
    },
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow for large |z|.
fn log1p_exp(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Fits the logistic rescaler by maximizing the Bernoulli log-likelihood of
/// the labels given `σ(slope · ln(clamp(p, ε, 1−ε)) + intercept)`, with an L2
/// penalty of 1e-6 on both coefficients to keep separable corpora bounded.
/// Newton iterations (with step halving whenever a step would decrease the
/// penalized likelihood) run until the gradient norm drops below 1e-8, at
/// most 100 times; failing that, the error carries the last iterate.
pub fn fit_platt(samples: &[ScoredSample], epsilon: f64) -> Result<PlattModel, RescaleError> {
    if samples.len() < 10 {
        return Err(RescaleError::TooFewSamples { n: samples.len() });
    }
    fit_platt_split(samples, epsilon)
}

/// The fit itself, without the public minimum-size gate: cross-fold training
/// splits may legitimately hold fewer than 10 samples (e.g. 10 samples at
/// k = 5 train on 8), and are size-policed by `cross_fold_rescale` instead.
fn fit_platt_split(samples: &[ScoredSample], epsilon: f64) -> Result<PlattModel, RescaleError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(RescaleError::InvalidEpsilon(epsilon));
    }
    let n = samples.len();
    let n_pos = samples.iter().filter(|s| s.correct).count();
    if n_pos == 0 || n_pos == n {
        return Err(RescaleError::SingleClass);
    }
    let x: Vec<f64> = samples
        .iter()
        .map(|s| s.confidence.clamp(epsilon, 1.0 - epsilon).ln())
        .collect();
    let y: Vec<f64> = samples.iter().map(|s| s.correct as u8 as f64).collect();

    let penalized_ll = |a: f64, b: f64| -> f64 {
        let data: f64 = x
            .iter()
            .zip(&y)
            .map(|(&xi, &yi)| {
                let z = a * xi + b;
                yi * z - log1p_exp(z)
            })
            .sum();
        data - 0.5 * L2_PENALTY * (a * a + b * b)
    };

    // Start from the intercept-only solution: slope 0, logit of base rate.
    let base_rate = n_pos as f64 / n as f64;
    let mut a = 0.0f64;
    let mut b = (base_rate / (1.0 - base_rate)).ln();
    let mut ll = penalized_ll(a, b);
    let mut grad_norm = f64::INFINITY;

    for _ in 0..MAX_ITERATIONS {
        let (mut ga, mut gb) = (0.0f64, 0.0f64);
        let (mut haa, mut hab, mut hbb) = (0.0f64, 0.0f64, 0.0f64);
        for (&xi, &yi) in x.iter().zip(&y) {
            let s = sigmoid(a * xi + b);
            let d = yi - s;
            ga += xi * d;
            gb += d;
            let w = s * (1.0 - s);
            haa += xi * xi * w;
            hab += xi * w;
            hbb += w;
        }
        ga -= L2_PENALTY * a;
        gb -= L2_PENALTY * b;
        grad_norm = (ga * ga + gb * gb).sqrt();
        if grad_norm < GRAD_TOL {
            return Ok(PlattModel {
                slope: a,
                intercept: b,
                feature: Feature::LnProb,
                epsilon,
            });
        }
        // Newton direction: solve (H + λI) δ = g. The penalized Hessian is
        // positive definite (Cauchy-Schwarz plus the ridge), so det > 0.
        let haa = haa + L2_PENALTY;
        let hbb = hbb + L2_PENALTY;
        let det = haa * hbb - hab * hab;
        let da = (hbb * ga - hab * gb) / det;
        let db = (haa * gb - hab * ga) / det;
        // Halve the step until the penalized likelihood stops decreasing.
        // Near the optimum the likelihood difference sinks below the noise
        // floor of the summation, so "not decreasing" is judged against that
        // floor rather than exactly — otherwise good steps get rejected and
        // the iteration freezes short of the gradient tolerance.
        let noise_floor = 1e-10 * (1.0 + ll.abs());
        let mut t = 1.0f64;
        loop {
            let candidate = penalized_ll(a + t * da, b + t * db);
            if candidate >= ll - noise_floor {
                a += t * da;
                b += t * db;
                ll = ll.max(candidate);
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                break; // no acceptable step this round; bail via iteration cap
            }
        }
    }
    Err(RescaleError::NoConvergence {
        iterations: MAX_ITERATIONS,
        grad_norm,
        slope: a,
        intercept: b,
    })
}

/// Applies a fitted model: `σ(slope · ln(clamp(p, ε, 1−ε)) + intercept)`.
/// The result is strictly inside (0, 1) for any input in [0, 1]; where the
/// sigmoid saturates in double precision (|z| beyond ~37) it is nudged to
/// the nearest interior value rather than returning exactly 0 or 1.
pub fn apply_platt(model: &PlattModel, p: f64) -> f64 {
    let Feature::LnProb = model.feature;
    let x = p.clamp(model.epsilon, 1.0 - model.epsilon).ln();
    sigmoid(model.slope * x + model.intercept).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Rescales every sample with a model that never saw it: partitions the
/// corpus by [`FoldPlan`], fits on the k−1 training folds, and scores the
/// held-out fold. Output order matches input order, and the whole procedure
/// is deterministic given `(samples, k, seed)`.
pub fn cross_fold_rescale(
    samples: &[ScoredSample],
    k: usize,
    seed: u64,
) -> Result<Vec<f64>, RescaleError> {
    cross_fold_rescale_with(samples, k, seed, DEFAULT_EPSILON)
}

/// [`cross_fold_rescale`] with an explicit clamping epsilon.
pub fn cross_fold_rescale_with(
    samples: &[ScoredSample],
    k: usize,
    seed: u64,
    epsilon: f64,
) -> Result<Vec<f64>, RescaleError> {
    if samples.len() < 10 {
        return Err(RescaleError::TooFewSamples { n: samples.len() });
    }
    let plan = FoldPlan::new(samples.len(), k, seed)?;
    let mut rescaled = vec![0.0f64; samples.len()];
    for fold in 0..k {
        let training: Vec<ScoredSample> = samples
            .iter()
            .zip(&plan.assignment)
            .filter(|&(_, &f)| f != fold)
            .map(|(&s, _)| s)
            .collect();
        let has_pos = training.iter().any(|s| s.correct);
        let has_neg = training.iter().any(|s| !s.correct);
        if !has_pos || !has_neg {
            return Err(RescaleError::FoldMissingClass { fold });
        }
        let model = fit_platt_split(&training, epsilon)?;
        for (i, s) in samples.iter().enumerate() {
            if plan.assignment[i] == fold {
                rescaled[i] = apply_platt(&model, s.confidence);
            }
        }
    }
    Ok(rescaled)
}

/// Decides whether a rescaled measure has collapsed to the base rate.
///
/// Collapse means the skill score is strictly below `threshold`: the measure
/// carries (almost) no signal, so rescaling flattened it onto the base rate.
/// The returned reason spells out why the ECE must then be omitted — the
/// flattened estimates will appear as one well calibrated bin, making a
/// near-zero ECE look like a success instead of an artifact.
pub fn detect_collapse(
    rescaled: &[f64],
    base_rate: f64,
    skill: f64,
    threshold: f64,
) -> (bool, Option<String>) {
    if skill >= threshold {
        return (false, None);
    }
    let mean = if rescaled.is_empty() {
        base_rate
    } else {
        rescaled.iter().sum::<f64>() / rescaled.len() as f64
    };
    let reason = format!(
        "ECE omitted: skill score {skill:.3} is below the collapse threshold {threshold:.3}. \
         Rescaling a signal-free measure squishes its estimates to the base rate \
         (mean rescaled confidence {mean:.3} vs base rate {base_rate:.3}), so the samples \
         will appear as one well calibrated bin and the ECE would be deceptively low."
    );
    (true, Some(reason))
}
