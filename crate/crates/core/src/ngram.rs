//! Ngram extraction and per-document frequency distributions.
//!
//! A "character" is a Unicode scalar value. Tokens are maximal runs of
//! non-whitespace characters; token ngrams are joined with a single space,
//! which is unambiguous because tokens never contain whitespace.

use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// What an ngram is made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unit {
    Character,
    Token,
}

impl Unit {
    pub(crate) fn tag(self) -> char {
        match self {
            Unit::Character => 'c',
            Unit::Token => 'w',
        }
    }
}

/// A unit plus the set of ngram lengths whose scores are averaged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NgramSpec {
    unit: Unit,
    lengths: Vec<usize>,
}

impl NgramSpec {
    /// Lengths are sorted and deduplicated. Fails on an empty set or a zero length.
    pub fn new(unit: Unit, lengths: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut lengths: Vec<usize> = lengths.into_iter().collect();
        lengths.sort_unstable();
        lengths.dedup();
        if lengths.is_empty() {
            return Err(Error::InvalidConfig("ngram length set is empty".into()));
        }
        if lengths[0] == 0 {
            return Err(Error::InvalidConfig("ngram lengths must be at least 1".into()));
        }
        Ok(Self { unit, lengths })
    }

    /// Single character ngram length.
    pub fn chars(n: usize) -> Result<Self> {
        Self::new(Unit::Character, [n])
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }
}

/// Renders as e.g. `c7` or `c6,c7` (token lengths use `w`).
impl fmt::Display for NgramSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.lengths.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}{}", self.unit.tag(), n)?;
        }
        Ok(())
    }
}

impl core::str::FromStr for NgramSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut unit = None;
        let mut lengths = Vec::new();
        let mut previous = 0;
        for part in s.split(',') {
            let part = part.trim();
            let mut chars = part.chars();
            let this_unit = match chars.next() {
                Some('c') => Unit::Character,
                Some('w') => Unit::Token,
                _ => return Err(Error::InvalidConfig(format!("bad ngram entry `{part}`"))),
            };
            if unit.is_some_and(|u| u != this_unit) {
                return Err(Error::InvalidConfig(
                    "character and token lengths cannot be mixed".into(),
                ));
            }
            unit = Some(this_unit);
            let digits = chars.as_str();
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
                return Err(Error::InvalidConfig(format!("bad ngram length in `{part}`")));
            }
            let n: usize = digits
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad ngram length in `{part}`")))?;
            // Canonical form is strictly increasing; anything else would break
            // the one-config-one-string property of signatures.
            if n <= previous {
                return Err(Error::InvalidConfig(format!(
                    "ngram lengths must be strictly increasing in `{s}`"
                )));
            }
            previous = n;
            lengths.push(n);
        }
        Self::new(unit.unwrap_or(Unit::Character), lengths)
    }
}

/// All contiguous ngrams of `text`, in order of appearance.
pub fn extract_ngrams(text: &str, unit: Unit, n: usize) -> Vec<Cow<'_, str>> {
    if n == 0 {
        return Vec::new();
    }
    match unit {
        Unit::Character => char_windows(text, n).map(Cow::Borrowed).collect(),
        Unit::Token => {
            let tokens: Vec<&str> = text.split_whitespace().collect();
            if tokens.len() < n {
                return Vec::new();
            }
            tokens
                .windows(n)
                .map(|w| {
                    if n == 1 {
                        Cow::Borrowed(w[0])
                    } else {
                        Cow::Owned(join_tokens(w))
                    }
                })
                .collect()
        }
    }
}

fn join_tokens(tokens: &[&str]) -> String {
    let mut out = String::with_capacity(tokens.iter().map(|t| t.len() + 1).sum());
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t);
    }
    out
}

/// Windows of `n` code points, borrowed from `text`.
fn char_windows(text: &str, n: usize) -> impl Iterator<Item = &str> {
    let mut bounds: Vec<usize> = text.char_indices().map(|(i, _)| i).collect();
    bounds.push(text.len());
    let windows = bounds.len().saturating_sub(n);
    (0..windows).map(move |i| &text[bounds[i]..bounds[i + n]])
}

/// Rank-sorted ngram counts of one document at one ngram length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrequencyDistribution {
    counts: Vec<usize>,
    total: usize,
}

impl FrequencyDistribution {
    /// Builds a distribution from arbitrary positive counts; they are sorted descending.
    pub fn from_counts(mut counts: Vec<usize>) -> Result<Self> {
        if counts.contains(&0) {
            return Err(Error::InvalidArgument("counts must be positive"));
        }
        counts.sort_unstable_by(|a, b| b.cmp(a));
        let total = counts.iter().sum();
        Ok(Self { counts, total })
    }

    /// Counts of the most common ngram first.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total_tokens(&self) -> usize {
        self.total
    }

    pub fn num_types(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Counts multiplicities. Equal counts are ordered by the ngram itself so the
/// result never depends on hashing or insertion order.
pub fn build_distribution<K, I>(ngrams: I) -> FrequencyDistribution
where
    K: Ord,
    I: IntoIterator<Item = K>,
{
    let mut table: BTreeMap<K, usize> = BTreeMap::new();
    let mut total = 0;
    for gram in ngrams {
        *table.entry(gram).or_insert(0) += 1;
        total += 1;
    }
    // BTreeMap iterates in key order and the sort is stable, so ties stay lexicographic.
    let mut entries: Vec<(K, usize)> = table.into_iter().collect();
    entries.sort_by_key(|e| core::cmp::Reverse(e.1));
    FrequencyDistribution {
        counts: entries.into_iter().map(|(_, c)| c).collect(),
        total,
    }
}

/// Extraction and counting in one pass, without materialising the ngram list.
pub fn distribution(text: &str, unit: Unit, n: usize) -> FrequencyDistribution {
    match unit {
        Unit::Character if n > 0 => build_distribution(char_windows(text, n)),
        _ => build_distribution(extract_ngrams(text, unit, n)),
    }
}

/// Laplace smoothing and clipping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    /// Added to every surviving count.
    pub lambda: f64,
    /// Ngrams whose relative frequency does not exceed this are dropped.
    pub epsilon: f64,
    /// Keep at most this many of the most frequent ngrams; `None` keeps all.
    pub top_k: Option<usize>,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self { lambda: 0.0, epsilon: 0.0, top_k: None }
    }
}

impl SmoothingConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self { lambda, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        if self.top_k == Some(0) {
            return Err(Error::InvalidConfig("top_k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Normalised, non-increasing probabilities derived from a [`FrequencyDistribution`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SmoothedDistribution {
    probs: Vec<f64>,
}

impl SmoothedDistribution {
    /// Wraps probabilities that the caller guarantees are normalised and sorted.
    pub fn from_probs(mut probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !(p.is_finite() && *p > 0.0 && *p <= 1.0)) {
            return Err(Error::InvalidArgument("probabilities must lie in (0, 1]"));
        }
        probs.sort_unstable_by(|a, b| b.total_cmp(a));
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Epsilon clip, then top-k, then add lambda, then renormalise.
pub fn smooth_and_clip(dist: &FrequencyDistribution, cfg: &SmoothingConfig) -> Result<SmoothedDistribution> {
    if dist.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let total = dist.total_tokens() as f64;
    let mut kept = if cfg.epsilon > 0.0 {
        // counts are sorted, so survivors form a prefix
        dist.counts().iter().take_while(|&&c| c as f64 / total > cfg.epsilon).count()
    } else {
        dist.num_types()
    };
    if let Some(k) = cfg.top_k {
        kept = kept.min(k);
    }
    if kept == 0 {
        return Err(Error::EmptyAfterClipping);
    }
    let survivors = &dist.counts()[..kept];
    let mass: f64 = survivors.iter().map(|&c| c as f64 + cfg.lambda).sum();
    let probs = survivors.iter().map(|&c| (c as f64 + cfg.lambda) / mass).collect();
    Ok(SmoothedDistribution { probs })
}

/// Truncates `text` to at most `max_chars` code points.
pub fn cap_chars(text: &str, max_chars: usize) -> &str {
    match text.char_indices().nth(max_chars) {
        Some((idx, _)) => &text[..idx],
        None => text,
    }
}
