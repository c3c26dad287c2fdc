//! Length normalisation against a uniform distribution of asymptote-scaled length.
//!
//! A document with `m` ngram occurrences is compared with a document of
//! `m' = m * alpha / (m + alpha)` distinct ngrams. Dividing by that uniform
//! score reads as "how much more redundant than an all-unique document".

use alloc::format;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math::floor;
use crate::scores::{Distance, Nonlinearity, ScoreKind};
use crate::zipf::ZipfTable;

/// Whether and how scores are divided by the uniform baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthNorm {
    /// Raw scores.
    Off,
    /// Baseline at the true ngram count.
    Unbounded,
    /// Baseline at the asymptote-scaled ngram count.
    Asymptote(f64),
}

impl LengthNorm {
    pub fn alpha(self) -> Option<f64> {
        match self {
            LengthNorm::Asymptote(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_enabled(self) -> bool {
        !matches!(self, LengthNorm::Off)
    }

    pub fn validate(self) -> Result<()> {
        match self {
            LengthNorm::Asymptote(a) if !(a.is_finite() && a > 0.0) => {
                Err(Error::InvalidConfig(format!("asymptote must be finite and > 0, got {a}")))
            }
            _ => Ok(()),
        }
    }
}

/// `none`, `inf`, or the asymptote value.
impl fmt::Display for LengthNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthNorm::Off => f.write_str("none"),
            LengthNorm::Unbounded => f.write_str("inf"),
            LengthNorm::Asymptote(a) => write!(f, "{a}"),
        }
    }
}

impl FromStr for LengthNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = match s {
            "none" | "off" => LengthNorm::Off,
            "inf" | "unbounded" => LengthNorm::Unbounded,
            _ => LengthNorm::Asymptote(
                s.parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad asymptote `{s}`")))?,
            ),
        };
        norm.validate()?;
        Ok(norm)
    }
}

/// `m * alpha / (m + alpha)`, or `m` itself without an asymptote.
pub fn scaled_length(m: f64, alpha: Option<f64>) -> f64 {
    match alpha {
        Some(a) => m * a / (m + a),
        None => m,
    }
}

/// Score of a uniform distribution over `m_tilde` ngrams.
///
/// The Zipfianness baseline sums over `floor(m_tilde)` ranks.
pub fn uniform_baseline(kind: ScoreKind, n: usize, m_tilde: f64) -> Result<f64> {
    uniform_baseline_with(kind, n, m_tilde, &ZipfTable::new())
}

pub(crate) fn uniform_baseline_with(kind: ScoreKind, n: usize, m_tilde: f64, zipf: &ZipfTable) -> Result<f64> {
    if m_tilde.is_nan() || m_tilde < 1.0 {
        return Err(Error::ScaledLengthBelowOne(m_tilde));
    }
    Ok(match kind {
        ScoreKind::Ttr => 1.0,
        ScoreKind::Moment(g) => moment_baseline(g, m_tilde),
        ScoreKind::Zipf { distance, renormalize } => {
            let ranks = floor(m_tilde) as usize;
            let reference = zipf.reference(n, ranks, renormalize);
            zipf_baseline(distance, &reference, m_tilde)
        }
    })
}

fn moment_baseline(g: Nonlinearity, m_tilde: f64) -> f64 {
    m_tilde * g.apply(1.0 / m_tilde)
}

fn zipf_baseline(d: Distance, reference: &[f64], m_tilde: f64) -> f64 {
    let uniform = 1.0 / m_tilde;
    reference.iter().map(|&x| d.apply(x, uniform)).sum()
}

/// `raw / baseline`.
pub fn normalize(raw: f64, baseline: f64) -> Result<f64> {
    if baseline <= 0.0 || !baseline.is_finite() {
        return Err(Error::DegenerateBaseline);
    }
    Ok(raw / baseline)
}
