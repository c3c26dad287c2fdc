//! Score configurations, their canonical signatures, and threshold classification.
//!
//! A signature names every hyperparameter that affects a score:
//!
//! ```text
//! cred|m:moment|n:c7|nl:pow2|l:0|e:0|k:inf|a:2000|t:none|v:1.0.0
//! ```
//!
//! Fields are, in order: metric, ngram unit and lengths, nonlinearity or
//! distance, Laplace smoothing, relative-frequency floor, top-k, length
//! normalisation asymptote (`none` = off, `inf` = unbounded), decision
//! threshold, and scoring version. Rendering and parsing are exact inverses;
//! parsing rejects any string that is not in canonical form.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::lengthnorm::LengthNorm;
use crate::ngram::{NgramSpec, SmoothingConfig};
use crate::scores::{CredScore, Distance, Metric, Nonlinearity, ScoreKind};

/// Version of the scoring definitions embedded in every signature.
pub const SCORE_VERSION: &str = "1.0.0";

/// Versions this build can reproduce.
pub const SUPPORTED_VERSIONS: &[&str] = &[SCORE_VERSION];

/// The full hyperparameter bundle behind a score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreConfig {
    pub kind: ScoreKind,
    pub ngrams: NgramSpec,
    pub smoothing: SmoothingConfig,
    pub lengthnorm: LengthNorm,
    pub threshold: Option<f64>,
    pub version: String,
}

impl ScoreConfig {
    /// Unsmoothed, unclipped config. Moment and Zipfianness use an asymptote of
    /// 2000; TTR is left unnormalised.
    pub fn new(kind: ScoreKind, ngrams: NgramSpec) -> Self {
        let lengthnorm = match kind {
            ScoreKind::Ttr => LengthNorm::Off,
            _ => LengthNorm::Asymptote(2000.0),
        };
        Self {
            kind,
            ngrams,
            smoothing: SmoothingConfig::default(),
            lengthnorm,
            threshold: None,
            version: SCORE_VERSION.to_string(),
        }
    }

    pub fn with_smoothing(mut self, smoothing: SmoothingConfig) -> Self {
        self.smoothing = smoothing;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.smoothing.lambda = lambda;
        self
    }

    pub fn with_lengthnorm(mut self, lengthnorm: LengthNorm) -> Self {
        self.lengthnorm = lengthnorm;
        self
    }

    pub fn with_threshold(mut self, threshold: Option<f64>) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn metric(&self) -> Metric {
        self.kind.metric()
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        self.smoothing.validate()?;
        self.lengthnorm.validate()?;
        if let Some(t) = self.threshold {
            if t.is_nan() {
                return Err(Error::InvalidConfig("threshold is NaN".into()));
            }
        }
        if !SUPPORTED_VERSIONS.contains(&self.version.as_str()) {
            return Err(Error::UnknownVersion(self.version.clone()));
        }
        if self.version.contains('|') {
            return Err(Error::InvalidConfig("version must not contain `|`".into()));
        }
        Ok(())
    }

    /// Canonical signature string.
    pub fn signature(&self) -> String {
        self.to_string()
    }

    /// Signature with the threshold field cleared; two configs score
    /// identically iff these agree.
    pub fn scoring_signature(&self) -> String {
        self.clone().with_threshold(None).signature()
    }
}

impl fmt::Display for ScoreConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cred|m:{}|n:{}|nl:{}|l:{}|e:{}|k:",
            self.kind.metric(),
            self.ngrams,
            self.kind.nl_field(),
            self.smoothing.lambda,
            self.smoothing.epsilon,
        )?;
        match self.smoothing.top_k {
            Some(k) => write!(f, "{k}")?,
            None => f.write_str("inf")?,
        }
        write!(f, "|a:{}|t:", self.lengthnorm)?;
        match self.threshold {
            Some(t) => write!(f, "{t}")?,
            None => f.write_str("none")?,
        }
        write!(f, "|v:{}", self.version)
    }
}

/// Canonical signature of `cfg`.
pub fn signature(cfg: &ScoreConfig) -> String {
    cfg.signature()
}

const KEYS: [&str; 9] = ["m", "n", "nl", "l", "e", "k", "a", "t", "v"];

fn malformed(field: &'static str, reason: impl Into<String>) -> Error {
    Error::MalformedSignature { field, reason: reason.into() }
}

fn parse_real(field: &'static str, value: &str) -> Result<f64> {
    let v: f64 = value.parse().map_err(|_| malformed(field, format!("`{value}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(malformed(field, format!("`{value}` is not finite")))
    }
}

/// Inverse of [`signature`].
pub fn parse_signature(s: &str) -> Result<ScoreConfig> {
    let mut parts = s.split('|');
    if parts.next() != Some("cred") {
        return Err(malformed("prefix", "signature must start with `cred|`"));
    }
    let mut values: Vec<&str> = Vec::with_capacity(9);
    for (field, part) in KEYS.into_iter().zip(parts.by_ref()) {
        let (key, value) = part
            .split_once(':')
            .ok_or_else(|| malformed(field, format!("expected `{field}:<value>`, got `{part}`")))?;
        if key != field {
            return Err(malformed(field, format!("expected key `{field}`, got `{key}`")));
        }
        values.push(value);
    }
    if values.len() != 9 {
        return Err(malformed("signature", format!("expected 9 fields, got {}", values.len())));
    }
    if parts.next().is_some() {
        return Err(malformed("signature", "trailing fields"));
    }
    let [m, n, nl, l, e, k, a, t, v] = values[..] else {
        unreachable!("length checked above")
    };

    if !SUPPORTED_VERSIONS.contains(&v) {
        return Err(Error::UnknownVersion(v.to_string()));
    }
    let metric: Metric = m.parse().map_err(|_| malformed("m", format!("unknown metric `{m}`")))?;
    let ngrams: NgramSpec = n.parse().map_err(|e: Error| malformed("n", e.to_string()))?;
    let kind = ScoreKind::from_fields(metric, nl).map_err(|e| malformed("nl", e.to_string()))?;
    let smoothing = SmoothingConfig {
        lambda: parse_real("l", l)?,
        epsilon: parse_real("e", e)?,
        top_k: match k {
            "inf" => None,
            _ => Some(k.parse().map_err(|_| malformed("k", format!("`{k}` is not a count")))?),
        },
    };
    let lengthnorm: LengthNorm = a.parse().map_err(|e: Error| malformed("a", e.to_string()))?;
    // an infinite threshold is a constant classifier, which tuning can pick
    let threshold = match t {
        "none" => None,
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => Some(parse_real("t", t)?),
    };
    let cfg = ScoreConfig { kind, ngrams, smoothing, lengthnorm, threshold, version: v.to_string() };
    cfg.validate()?;
    if cfg.signature() != s {
        return Err(malformed("signature", format!("not in canonical form (expected `{}`)", cfg.signature())));
    }
    Ok(cfg)
}

/// Binary decision of a threshold classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Clean,
    Noisy,
}

impl Decision {
    pub fn is_clean(self) -> bool {
        self == Decision::Clean
    }
}

/// Noisy iff `value > tau`; ties are clean.
pub fn classify_value(value: f64, tau: f64) -> Decision {
    if value > tau {
        Decision::Noisy
    } else {
        Decision::Clean
    }
}

/// Classifies `score` with the threshold carried by `classifier`, after
/// checking that both were produced under the same scoring configuration.
pub fn classify(score: &CredScore, classifier: &ScoreConfig) -> Result<Decision> {
    Classifier::new(classifier.clone())?.classify(score)
}

/// A threshold classifier with its scoring signature precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    config: ScoreConfig,
    tau: f64,
    scoring_signature: String,
}

impl Classifier {
    pub fn new(config: ScoreConfig) -> Result<Self> {
        config.validate()?;
        let tau = config.threshold.ok_or(Error::MissingThreshold)?;
        let scoring_signature = config.scoring_signature();
        Ok(Self { config, tau, scoring_signature })
    }

    pub fn from_signature(s: &str) -> Result<Self> {
        Self::new(parse_signature(s)?)
    }

    pub fn config(&self) -> &ScoreConfig {
        &self.config
    }

    pub fn threshold(&self) -> f64 {
        self.tau
    }

    pub fn classify(&self, score: &CredScore) -> Result<Decision> {
        if strip_threshold(&score.signature) != Some(self.scoring_signature.clone()) {
            return Err(Error::ConfigMismatch);
        }
        Ok(classify_value(score.value, self.tau))
    }

    /// Classifies a raw value the caller knows was produced by this config.
    pub fn classify_value(&self, value: f64) -> Decision {
        classify_value(value, self.tau)
    }
}

fn strip_threshold(sig: &str) -> Option<String> {
    let start = sig.find("|t:")?;
    let end = start + 1 + sig[start + 1..].find('|')?;
    Some(format!("{}|t:none{}", &sig[..start], &sig[end..]))
}

/// Named configurations shipped with the library.
///
/// Hyperparameters follow the best single-length settings of the constrained
/// grid search. Thresholds are provisional: they were tuned for F1 on the
/// synthetic prose-vs-boilerplate generator in [`crate::synth`] and should be
/// re-tuned on labelled data before production filtering.
pub fn default_configs() -> Vec<(&'static str, ScoreConfig)> {
    let c = |n| NgramSpec::chars(n).expect("valid length");
    alloc::vec![
        ("ttr-c6", ScoreConfig::new(ScoreKind::Ttr, c(6)).with_threshold(Some(DEFAULT_THRESHOLDS[0]))),
        (
            "moment-c6",
            ScoreConfig::new(ScoreKind::Moment(Nonlinearity::Power(1.5)), c(6)).with_threshold(Some(DEFAULT_THRESHOLDS[1])),
        ),
        (
            "zipf-c5",
            ScoreConfig::new(ScoreKind::zipf(Distance::Squared), c(5))
                .with_lengthnorm(LengthNorm::Asymptote(5000.0))
                .with_threshold(Some(DEFAULT_THRESHOLDS[2])),
        ),
        (
            "moment-c7-noisy",
            ScoreConfig::new(ScoreKind::Moment(Nonlinearity::Power(2.0)), c(7)).with_threshold(Some(DEFAULT_THRESHOLDS[3])),
        ),
        (
            "zipf-c4-noisy",
            ScoreConfig::new(ScoreKind::zipf(Distance::Squared), c(4)).with_threshold(Some(DEFAULT_THRESHOLDS[4])),
        ),
    ]
}

const DEFAULT_THRESHOLDS: [f64; 5] = [0.3313, 1.213, 1.943, 1.606, 2.701];

/// Signatures of [`default_configs`], in the same order.
pub fn default_signatures() -> Vec<(&'static str, String)> {
    default_configs().into_iter().map(|(name, cfg)| (name, cfg.signature())).collect()
}

/// Looks up a shipped configuration by name.
pub fn default_config(name: &str) -> Option<ScoreConfig> {
    default_configs().into_iter().find(|(n, _)| *n == name).map(|(_, c)| c)
}
