//! Character-redundancy scores for web text.
//!
//! A document is turned into a rank-sorted character (or word) ngram
//! distribution, optionally smoothed and clipped, and summarised by one of
//! three scores: type-token ratio, a moment `sum g(p_i)`, or the distance from
//! a reference Zipf curve. Scores can be divided by the score of a uniform
//! distribution of comparable length, averaged over several ngram lengths and
//! thresholded into a clean/noisy decision. A configuration round-trips
//! through a compact signature string such as
//! `cred|m:moment|n:c6|nl:pow2|l:0|e:0|k:inf|a:2000|t:none|v:1.0.0`.
//!
//! The crate is `no_std` with `alloc`. File formats, parallelism and the
//! command line live in the `cred` crate.
//!
//! ```
//! use cred_core::{parse_signature, score_document};
//!
//! let cfg = parse_signature("cred|m:moment|n:c3|nl:pow2|l:0|e:0|k:inf|a:none|t:none|v:1.0.0").unwrap();
//! let clean = score_document("The quick brown fox jumps over the lazy dog.", &cfg).unwrap();
//! let noisy = score_document("buy now buy now buy now buy now buy now", &cfg).unwrap();
//! assert!(noisy.value > clean.value);
//! ```

#![no_std]

extern crate alloc;

pub mod bench;
pub mod classifier;
pub mod error;
pub mod lengthnorm;
mod math;
pub mod ngram;
pub mod plan;
pub mod rgd;
pub mod scores;
pub mod synth;
pub mod tuner;
pub mod zipf;

pub use bench::{bootstrap_ci, f1, p4, BinaryTask, Confusion, Label, LabeledDocument, Split, TaskExample, TaskKind};
pub use classifier::{
    classify, classify_value, default_config, default_configs, default_signatures, parse_signature, signature,
    Classifier, Decision, ScoreConfig, SCORE_VERSION,
};
pub use error::{Error, Result};
pub use lengthnorm::{normalize, scaled_length, uniform_baseline, LengthNorm};
pub use ngram::{
    build_distribution, distribution, extract_ngrams, smooth_and_clip, FrequencyDistribution, NgramSpec,
    SmoothedDistribution, SmoothingConfig, Unit,
};
pub use plan::ScorePlan;
pub use rgd::{fit_zipf_params, rgd, RgdConfig, RgdResult};
pub use scores::{
    moment_score, score_document, score_value, ttr_score, type_token_ratio, zipf_score, CredScore, Distance, Metric,
    Nonlinearity, ScoreKind,
};
pub use tuner::{grid_search, top_k_report, tune_threshold, GridSpec, Objective, RankedConfig};
pub use zipf::{zipf_reference, ZipfParams, ZipfTable};
