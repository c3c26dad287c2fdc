//! Threshold selection and grid search over score configurations.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bench::{class_weighted_counts, Confusion, TaskExample};
use crate::classifier::{classify_value, ScoreConfig};
use crate::error::{Error, Result};
use crate::lengthnorm::LengthNorm;
use crate::math::sqrt;
use crate::ngram::{NgramSpec, SmoothingConfig, Unit};
use crate::plan::ScorePlan;
use crate::scores::{Distance, Metric, Nonlinearity, ScoreKind};
use crate::zipf::ZipfTable;

/// Share of clean mass used by the P4 objective.
pub const P4_CLEAN_WEIGHT: f64 = 0.75;

/// A configuration fails on too many documents when more than this fraction
/// of them cannot be scored.
pub const MAX_FAILURE_FRACTION: f64 = 0.10;

/// What a threshold (and a grid search) maximises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    F1,
    /// P4 after reweighting so the clean class holds `clean_weight` of the mass.
    P4Weighted { clean_weight: f64 },
}

impl Objective {
    pub fn p4_weighted() -> Self {
        Objective::P4Weighted { clean_weight: P4_CLEAN_WEIGHT }
    }

    pub fn evaluate(&self, c: &Confusion) -> Result<f64> {
        match *self {
            Objective::F1 => crate::bench::f1(c),
            Objective::P4Weighted { clean_weight } => Ok(class_weighted_counts(c, clean_weight)?.p4()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::F1 => "f1",
            Objective::P4Weighted { .. } => "p4-weighted",
        }
    }
}

impl core::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(Objective::F1),
            "p4" | "p4-weighted" => Ok(Objective::p4_weighted()),
            _ => Err(Error::InvalidArgument("unknown objective (expected f1 or p4-weighted)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdChoice {
    pub tau: f64,
    pub objective: f64,
    pub confusion: Confusion,
}

/// Midpoint of `a < b`, falling back to `a` when the midpoint would not
/// separate them (adjacent floats, infinite `b`).
fn separating_midpoint(a: f64, b: f64) -> f64 {
    let mid = a + (b - a) / 2.0;
    if mid >= a && mid < b {
        mid
    } else {
        a
    }
}

/// Best threshold for `(value, gold_clean)` pairs.
///
/// Candidates are `-inf`, the midpoints between adjacent distinct values and
/// `+inf`; together they realise every achievable confusion matrix. Ties in
/// the objective go to the smallest threshold.
pub fn tune_threshold(scores: &[(f64, bool)], objective: Objective) -> Result<ThresholdChoice> {
    if scores.iter().any(|(v, _)| v.is_nan()) {
        return Err(Error::InvalidArgument("scores must not be NaN"));
    }
    let positives = scores.iter().filter(|(_, g)| *g).count() as u64;
    let negatives = scores.len() as u64 - positives;
    if positives == 0 {
        return Err(Error::EmptyPositiveClass);
    }
    if negatives == 0 {
        return Err(Error::EmptyNegativeClass);
    }
    let mut sorted: Vec<(f64, bool)> = scores.to_vec();
    sorted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    // Everything noisy below the smallest value.
    let mut c = Confusion { tp: 0, fp: 0, tn: negatives, fn_: positives };
    let mut best = ThresholdChoice { tau: f64::NEG_INFINITY, objective: objective.evaluate(&c)?, confusion: c };
    let mut i = 0;
    while i < sorted.len() {
        let value = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == value {
            if sorted[i].1 {
                c.tp += 1;
                c.fn_ -= 1;
            } else {
                c.fp += 1;
                c.tn -= 1;
            }
            i += 1;
        }
        let tau = match sorted.get(i) {
            Some(&(next, _)) => separating_midpoint(value, next),
            None => f64::INFINITY,
        };
        let score = objective.evaluate(&c)?;
        if score > best.objective {
            best = ThresholdChoice { tau, objective: score, confusion: c };
        }
    }
    Ok(best)
}

/// Cartesian hyperparameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub ngram_sets: Vec<NgramSpec>,
    pub kinds: Vec<ScoreKind>,
    pub lambdas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub top_ks: Vec<Option<usize>>,
    pub lengthnorms: Vec<LengthNorm>,
}

impl GridSpec {
    /// Character lengths 1..=10 alone, contiguous pairs `(n, n+1)` and skip-2
    /// pairs `(n, n+2)`.
    pub fn constrained_ngram_sets() -> Vec<NgramSpec> {
        let mut sets = Vec::new();
        for n in 1..=10 {
            sets.push(NgramSpec::new(Unit::Character, [n]));
        }
        for n in 1..=9 {
            sets.push(NgramSpec::new(Unit::Character, [n, n + 1]));
        }
        for n in 1..=8 {
            sets.push(NgramSpec::new(Unit::Character, [n, n + 2]));
        }
        sets.into_iter().map(|s| s.expect("valid lengths")).collect()
    }

    /// The constrained search: no clipping, lambda in {0, 1}, three
    /// nonlinearities or four distances, asymptote in {2000, 5000, inf}.
    /// TTR is searched over ngram sets only.
    pub fn constrained(metric: Metric) -> Self {
        let kinds = match metric {
            Metric::Ttr => alloc::vec![ScoreKind::Ttr],
            Metric::Moment => [1.5, 2.0, 3.0].into_iter().map(|k| ScoreKind::Moment(Nonlinearity::Power(k))).collect(),
            Metric::Zipf => [Distance::Squared, Distance::log_abs(), Distance::log_squared(), Distance::Jsd]
                .into_iter()
                .map(ScoreKind::zipf)
                .collect(),
        };
        let (lambdas, lengthnorms) = match metric {
            Metric::Ttr => (alloc::vec![0.0], alloc::vec![LengthNorm::Off]),
            _ => (
                alloc::vec![0.0, 1.0],
                alloc::vec![LengthNorm::Asymptote(2000.0), LengthNorm::Asymptote(5000.0), LengthNorm::Unbounded],
            ),
        };
        Self {
            ngram_sets: Self::constrained_ngram_sets(),
            kinds,
            lambdas,
            epsilons: alloc::vec![0.0],
            top_ks: alloc::vec![None],
            lengthnorms,
        }
    }

    /// Restricts the grid to the given ngram sets.
    pub fn with_ngram_sets(mut self, sets: Vec<NgramSpec>) -> Self {
        self.ngram_sets = sets;
        self
    }

    pub fn len(&self) -> usize {
        self.ngram_sets.len()
            * self.kinds.len()
            * self.lambdas.len()
            * self.epsilons.len()
            * self.top_ks.len()
            * self.lengthnorms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn configs(&self) -> Vec<ScoreConfig> {
        let mut out = Vec::with_capacity(self.len());
        for ngrams in &self.ngram_sets {
            for &kind in &self.kinds {
                for &lambda in &self.lambdas {
                    for &epsilon in &self.epsilons {
                        for &top_k in &self.top_ks {
                            for &norm in &self.lengthnorms {
                                out.push(
                                    ScoreConfig::new(kind, ngrams.clone())
                                        .with_smoothing(SmoothingConfig { lambda, epsilon, top_k })
                                        .with_lengthnorm(norm),
                                );
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// One grid point with its tuned threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedConfig {
    /// The configuration with its tuned threshold filled in.
    pub config: ScoreConfig,
    pub signature: String,
    pub tune_objective: f64,
    /// Documents that could not be scored (counted as noisy).
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedConfig {
    pub config: ScoreConfig,
    pub failures: usize,
    pub reason: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridOutcome {
    /// Best first; ties ordered by signature.
    pub ranked: Vec<RankedConfig>,
    pub skipped: Vec<SkippedConfig>,
}

/// Reference table large enough for every document in `texts`.
pub fn zipf_table_for<'a>(plan: &ScorePlan, texts: impl IntoIterator<Item = &'a str>) -> ZipfTable {
    let max_chars = texts.into_iter().map(|t| t.chars().count()).max().unwrap_or(0);
    ZipfTable::precompute(plan.zipf_lengths(), max_chars.max(1))
}

/// Grid search on the tune examples, one document at a time.
pub fn grid_search(tune: &[TaskExample], grid: &GridSpec, objective: Objective) -> Result<GridOutcome> {
    let configs = grid.configs();
    if configs.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let plan = ScorePlan::new(&configs);
    let table = zipf_table_for(&plan, tune.iter().map(|e| e.text.as_str()));
    let components: Vec<Vec<Result<f64>>> = tune.iter().map(|e| plan.score_text(&e.text, &table)).collect();
    let gold: Vec<bool> = tune.iter().map(|e| e.clean).collect();
    rank_grid(&configs, &plan, &components, &gold, objective)
}

/// Per-document values of config `index`; failures are reported as `Err`.
pub fn config_values(plan: &ScorePlan, index: usize, components: &[Vec<Result<f64>>]) -> Vec<Result<f64>> {
    components.iter().map(|c| plan.config_value(index, c)).collect()
}

/// Tunes a threshold for every config given precomputed document components
/// and orders the results.
pub fn rank_grid(
    configs: &[ScoreConfig],
    plan: &ScorePlan,
    components: &[Vec<Result<f64>>],
    gold: &[bool],
    objective: Objective,
) -> Result<GridOutcome> {
    if configs.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut outcome = GridOutcome::default();
    for (i, cfg) in configs.iter().enumerate() {
        let values = config_values(plan, i, components);
        let failures = values.iter().filter(|v| v.is_err()).count();
        if failures as f64 > MAX_FAILURE_FRACTION * values.len() as f64 {
            let reason = values.into_iter().find_map(|v| v.err()).unwrap_or(Error::EmptyGrid);
            outcome.skipped.push(SkippedConfig { config: cfg.clone(), failures, reason });
            continue;
        }
        let pairs: Vec<(f64, bool)> = values
            .into_iter()
            .zip(gold)
            .map(|(v, &g)| (v.unwrap_or(f64::INFINITY), g))
            .collect();
        let choice = tune_threshold(&pairs, objective)?;
        let config = cfg.clone().with_threshold(Some(choice.tau));
        outcome.ranked.push(RankedConfig {
            signature: config.signature(),
            config,
            tune_objective: choice.objective,
            failures,
        });
    }
    outcome
        .ranked
        .sort_by(|a, b| b.tune_objective.total_cmp(&a.tune_objective).then_with(|| a.signature.cmp(&b.signature)));
    Ok(outcome)
}

/// Test-split result of one frozen configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TestEvaluation {
    pub signature: String,
    pub tune_objective: f64,
    pub test_objective: f64,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopKReport {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single configuration.
    pub stdev: f64,
    pub per_config: Vec<TestEvaluation>,
}

/// Confusion of a thresholded config on `examples`. Unscorable documents are noisy.
pub fn evaluate_frozen(values: &[Result<f64>], gold: &[bool], tau: f64) -> Confusion {
    let predicted: Vec<bool> = values
        .iter()
        .map(|v| match v {
            Ok(v) => classify_value(*v, tau).is_clean(),
            Err(_) => false,
        })
        .collect();
    Confusion::from_decisions(gold, &predicted)
}

/// Re-evaluates the `k` best tune configurations on the test examples with
/// their tune thresholds unchanged.
pub fn top_k_report(ranked: &[RankedConfig], test: &[TaskExample], k: usize, objective: Objective) -> Result<TopKReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1"));
    }
    if k > ranked.len() {
        return Err(Error::NotEnoughRanked { k, available: ranked.len() });
    }
    let top = &ranked[..k];
    let configs: Vec<ScoreConfig> = top.iter().map(|r| r.config.clone()).collect();
    let plan = ScorePlan::new(&configs);
    let table = zipf_table_for(&plan, test.iter().map(|e| e.text.as_str()));
    let components: Vec<Vec<Result<f64>>> = test.iter().map(|e| plan.score_text(&e.text, &table)).collect();
    let gold: Vec<bool> = test.iter().map(|e| e.clean).collect();
    let mut per_config = Vec::with_capacity(k);
    for (i, entry) in top.iter().enumerate() {
        let tau = entry.config.threshold.ok_or(Error::MissingThreshold)?;
        let values = config_values(&plan, i, &components);
        let confusion = evaluate_frozen(&values, &gold, tau);
        per_config.push(TestEvaluation {
            signature: entry.signature.clone(),
            tune_objective: entry.tune_objective,
            test_objective: objective.evaluate(&confusion)?,
            confusion,
        });
    }
    let objectives: Vec<f64> = per_config.iter().map(|e| e.test_objective).collect();
    let (mean, stdev) = mean_and_stdev(&objectives);
    Ok(TopKReport { mean, stdev, per_config })
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_and_stdev(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, sqrt(var))
}
