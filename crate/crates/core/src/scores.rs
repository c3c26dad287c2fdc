//! The three redundancy scores. Every score is oriented so that a higher
//! value means a more repetitive (noisier) document.

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::classifier::ScoreConfig;
use crate::error::{Error, Result};
use crate::math::{ln, powf};
use crate::ngram::{FrequencyDistribution, SmoothedDistribution};
use crate::plan::ScorePlan;
use crate::zipf::{ZipfParams, ZipfTable};

/// Floor added inside logarithms so exact matches stay finite.
pub const DEFAULT_LOG_DELTA: f64 = 1e-12;

/// Which score family a configuration computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Ttr,
    Moment,
    Zipf,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Ttr => "ttr",
            Metric::Moment => "moment",
            Metric::Zipf => "zipf",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ttr" => Ok(Metric::Ttr),
            "moment" => Ok(Metric::Moment),
            "zipf" => Ok(Metric::Zipf),
            other => Err(Error::InvalidConfig(format!("unknown metric `{other}`"))),
        }
    }
}

/// `g(x)` applied to each probability by the moment score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    /// `x^k`
    Power(f64),
    /// `-x ln x`
    Entropy,
    /// `(x ln x)^2`
    SquaredEntropy,
}

impl Nonlinearity {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Nonlinearity::Power(k) => powf(x, k),
            Nonlinearity::Entropy => {
                if x > 0.0 {
                    -x * ln(x)
                } else {
                    0.0
                }
            }
            Nonlinearity::SquaredEntropy => {
                if x > 0.0 {
                    let v = x * ln(x);
                    v * v
                } else {
                    0.0
                }
            }
        }
    }

    pub fn validate(self) -> Result<()> {
        match self {
            Nonlinearity::Power(k) if !(k.is_finite() && k > 0.0) => {
                Err(Error::InvalidConfig(format!("power exponent must be finite and > 0, got {k}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Power(k) => write!(f, "pow{k}"),
            Nonlinearity::Entropy => f.write_str("ent"),
            Nonlinearity::SquaredEntropy => f.write_str("sqent"),
        }
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ent" | "entropy" => Ok(Nonlinearity::Entropy),
            "sqent" | "squared-entropy" => Ok(Nonlinearity::SquaredEntropy),
            _ => {
                let k = s
                    .strip_prefix("pow")
                    .or_else(|| s.strip_prefix("x^"))
                    .and_then(|k| k.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown nonlinearity `{s}`")))?;
                let g = Nonlinearity::Power(k);
                g.validate()?;
                Ok(g)
            }
        }
    }
}

/// Pointwise distance `d(reference, observed)` summed by the Zipfianness score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    /// `|x - y|^2`
    Squared,
    /// `ln(|x - y| + delta)`
    LogAbs { delta: f64 },
    /// `ln(|x - y| + delta)^2`
    LogSquared { delta: f64 },
    /// Pointwise Jensen-Shannon term.
    Jsd,
    /// Pointwise `x ln((x + delta) / (y + delta))`.
    Kl { delta: f64 },
    /// `|x - y|`
    Abs,
}

impl Distance {
    pub fn log_abs() -> Self {
        Distance::LogAbs { delta: DEFAULT_LOG_DELTA }
    }

    pub fn log_squared() -> Self {
        Distance::LogSquared { delta: DEFAULT_LOG_DELTA }
    }

    pub fn kl() -> Self {
        Distance::Kl { delta: DEFAULT_LOG_DELTA }
    }

    pub fn apply(self, x: f64, y: f64) -> f64 {
        match self {
            Distance::Squared => {
                let d = x - y;
                d * d
            }
            Distance::LogAbs { delta } => ln((x - y).abs() + delta),
            Distance::LogSquared { delta } => {
                let l = ln((x - y).abs() + delta);
                l * l
            }
            Distance::Jsd => {
                let m = 0.5 * (x + y);
                0.5 * (xlogx_over(x, m) + xlogx_over(y, m))
            }
            Distance::Kl { delta } => x * ln((x + delta) / (y + delta)),
            Distance::Abs => (x - y).abs(),
        }
    }

    /// True for the distances that were found effective and belong to the default grid.
    pub fn is_default_family(self) -> bool {
        !matches!(self, Distance::Kl { .. } | Distance::Abs)
    }

    pub fn validate(self) -> Result<()> {
        match self {
            Distance::LogAbs { delta } | Distance::LogSquared { delta } | Distance::Kl { delta }
                if !(delta.is_finite() && delta > 0.0) =>
            {
                Err(Error::InvalidConfig(format!("log floor must be finite and > 0, got {delta}")))
            }
            _ => Ok(()),
        }
    }
}

fn xlogx_over(x: f64, m: f64) -> f64 {
    if x > 0.0 {
        x * ln(x / m)
    } else {
        0.0
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Squared => f.write_str("sq"),
            Distance::LogAbs { delta } => write!(f, "logabs:{delta:e}"),
            Distance::LogSquared { delta } => write!(f, "logsq:{delta:e}"),
            Distance::Jsd => f.write_str("jsd"),
            Distance::Kl { delta } => write!(f, "kl:{delta:e}"),
            Distance::Abs => f.write_str("abs"),
        }
    }
}

impl FromStr for Distance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, delta) = match s.split_once(':') {
            Some((name, delta)) => {
                let delta = delta
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidConfig(format!("bad log floor in `{s}`")))?;
                (name, Some(delta))
            }
            None => (s, None),
        };
        let delta_or_default = delta.unwrap_or(DEFAULT_LOG_DELTA);
        let d = match (name, delta) {
            ("sq" | "squared", None) => Distance::Squared,
            ("jsd", None) => Distance::Jsd,
            ("abs", None) => Distance::Abs,
            ("logabs" | "log", _) => Distance::LogAbs { delta: delta_or_default },
            ("logsq", _) => Distance::LogSquared { delta: delta_or_default },
            ("kl", _) => Distance::Kl { delta: delta_or_default },
            _ => return Err(Error::InvalidConfig(format!("unknown distance `{s}`"))),
        };
        d.validate()?;
        Ok(d)
    }
}

/// Metric together with its nonlinearity or distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreKind {
    Ttr,
    Moment(Nonlinearity),
    /// `renormalize` rescales the reference curve to sum to one over the
    /// compared ranks; off by default.
    Zipf { distance: Distance, renormalize: bool },
}

impl ScoreKind {
    pub fn zipf(distance: Distance) -> Self {
        ScoreKind::Zipf { distance, renormalize: false }
    }

    pub fn metric(self) -> Metric {
        match self {
            ScoreKind::Ttr => Metric::Ttr,
            ScoreKind::Moment(_) => Metric::Moment,
            ScoreKind::Zipf { .. } => Metric::Zipf,
        }
    }

    pub fn validate(self) -> Result<()> {
        match self {
            ScoreKind::Ttr => Ok(()),
            ScoreKind::Moment(g) => g.validate(),
            ScoreKind::Zipf { distance, .. } => distance.validate(),
        }
    }

    /// The `nl:` field of a signature.
    pub fn nl_field(self) -> String {
        match self {
            ScoreKind::Ttr => "none".into(),
            ScoreKind::Moment(g) => format!("{g}"),
            ScoreKind::Zipf { distance, renormalize: false } => format!("{distance}"),
            ScoreKind::Zipf { distance, renormalize: true } => format!("{distance}+norm"),
        }
    }

    /// Inverse of [`ScoreKind::nl_field`] for a given metric.
    pub fn from_fields(metric: Metric, nl: &str) -> Result<Self> {
        match metric {
            Metric::Ttr if nl == "none" => Ok(ScoreKind::Ttr),
            Metric::Ttr => Err(Error::InvalidConfig(format!("ttr takes no nonlinearity, got `{nl}`"))),
            Metric::Moment => Ok(ScoreKind::Moment(nl.parse()?)),
            Metric::Zipf => {
                let (d, renormalize) = match nl.strip_suffix("+norm") {
                    Some(d) => (d, true),
                    None => (nl, false),
                };
                Ok(ScoreKind::Zipf { distance: d.parse()?, renormalize })
            }
        }
    }
}

/// A document score and the signature of the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CredScore {
    pub value: f64,
    pub metric: Metric,
    pub signature: String,
}

/// Plain type/token ratio: distinct ngrams over ngram occurrences.
pub fn type_token_ratio(dist: &FrequencyDistribution) -> Result<f64> {
    if dist.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    Ok(dist.num_types() as f64 / dist.total_tokens() as f64)
}

/// `1 - types/tokens`; zero when every ngram is unique.
pub fn ttr_score(dist: &FrequencyDistribution) -> Result<f64> {
    Ok(1.0 - type_token_ratio(dist)?)
}

/// `sum_i g(p_i)`.
pub fn moment_score(p: &SmoothedDistribution, g: Nonlinearity) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    Ok(p.probs().iter().map(|&x| g.apply(x)).sum())
}

/// `sum_i d(reference_i, p_i)` over the support of `p`, against the analytic
/// reference for ngram length `n`.
pub fn zipf_score(p: &SmoothedDistribution, n: usize, d: Distance) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("ngram length must be at least 1"));
    }
    let reference = ZipfParams::default().curve(n, p.len());
    zipf_score_against(p, &reference, d)
}

/// Zipfianness against an explicit reference curve (at least as long as `p`).
pub fn zipf_score_against(p: &SmoothedDistribution, reference: &[f64], d: Distance) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    if reference.len() < p.len() {
        return Err(Error::InvalidArgument("reference curve shorter than the distribution"));
    }
    Ok(reference.iter().zip(p.probs()).map(|(&x, &y)| d.apply(x, y)).sum())
}

/// Scores one document: per-length score, length normalisation, then the
/// mean over the configured lengths.
pub fn score_document(text: &str, cfg: &ScoreConfig) -> Result<CredScore> {
    Ok(CredScore {
        value: score_value(text, cfg)?,
        metric: cfg.kind.metric(),
        signature: cfg.signature(),
    })
}

/// [`score_document`] without building the signature string.
pub fn score_value(text: &str, cfg: &ScoreConfig) -> Result<f64> {
    cfg.validate()?;
    let plan = ScorePlan::new(core::slice::from_ref(cfg));
    let components = plan.score_text(text, &ZipfTable::new());
    plan.config_value(0, &components)
}
