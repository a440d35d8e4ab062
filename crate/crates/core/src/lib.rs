//! Confidence and calibration analysis for generative code-model outputs.
//!
//! The crate ingests per-sample records of model generations (token
//! log-probabilities, self-reported confidences, true/false probe responses,
//! reference solutions, and test outcomes), derives confidence scores and
//! correctness labels from them, and measures how well confidence tracks
//! correctness: reliability bins, expected calibration error, Brier score and
//! skill, ROC-AUC, and logistic rescaling with cross-fold evaluation.
//!
//! Module layout mirrors the pipeline:
//!
//! * [`records`] — the JSONL record schema, loading, and validation
//! * [`confidence`] — confidence measures derived from a record
//! * [`correctness`] — correctness notions and their cross-tabulation
//! * [`metrics`] — reliability bins, ECE, Brier, skill score, AUC
//! * [`rescale`] — Platt rescaling, fold plans, and collapse detection
//! * [`report`] — result tables, reliability plots, and decision bands
//! * [`synth`] — synthetic corpora with known calibration properties
//! * [`rng`] — the pinned deterministic generator used by `rescale`/`synth`

pub mod confidence;
pub mod correctness;
pub mod metrics;
pub mod records;
pub mod report;
pub mod rescale;
pub mod rng;
pub mod synth;
