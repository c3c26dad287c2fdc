//! Shared evaluation of many configurations over the same documents.
//!
//! A configuration decomposes into one length-normalised score per ngram
//! length. Those per-length "components" are deduplicated across configs,
//! and inside a document each ngram distribution, raw score and baseline is
//! computed once. Single-document scoring goes through the same path, so a
//! grid search and `score_document` can never disagree.

use alloc::vec::Vec;

use crate::classifier::ScoreConfig;
use crate::error::{Error, Result};
use crate::lengthnorm::{normalize, scaled_length, uniform_baseline_with, LengthNorm};
use crate::ngram::{distribution, smooth_and_clip, FrequencyDistribution, SmoothingConfig, Unit};
use crate::scores::{moment_score, ttr_score, zipf_score_against, ScoreKind};
use crate::zipf::ZipfTable;

#[derive(Debug, Clone, PartialEq)]
struct Component {
    unit: Unit,
    n: usize,
    kind: ScoreKind,
    smoothing: SmoothingConfig,
    norm: LengthNorm,
}

/// Components sharing one ngram distribution.
#[derive(Debug, Clone)]
struct Group {
    unit: Unit,
    n: usize,
    raws: Vec<(ScoreKind, SmoothingConfig)>,
    baselines: Vec<(ScoreKind, LengthNorm)>,
    /// (component index, raw index, baseline index if normalised)
    members: Vec<(usize, usize, Option<usize>)>,
}

/// Deduplicated per-length work for a set of configurations.
#[derive(Debug, Clone)]
pub struct ScorePlan {
    components: Vec<Component>,
    configs: Vec<Vec<usize>>,
    groups: Vec<Group>,
}

fn index_of<T: PartialEq>(items: &mut Vec<T>, item: T) -> usize {
    match items.iter().position(|x| *x == item) {
        Some(i) => i,
        None => {
            items.push(item);
            items.len() - 1
        }
    }
}

impl ScorePlan {
    pub fn new(configs: &[ScoreConfig]) -> Self {
        let mut components = Vec::new();
        let mut config_components = Vec::with_capacity(configs.len());
        for cfg in configs {
            let unit = cfg.ngrams.unit();
            let ids = cfg
                .ngrams
                .lengths()
                .iter()
                .map(|&n| {
                    // TTR is defined on raw counts; normalising by its constant
                    // baseline is the identity, so both collapse to one component.
                    let (smoothing, norm) = match cfg.kind {
                        ScoreKind::Ttr => (SmoothingConfig::default(), LengthNorm::Off),
                        _ => (cfg.smoothing, cfg.lengthnorm),
                    };
                    index_of(&mut components, Component { unit, n, kind: cfg.kind, smoothing, norm })
                })
                .collect();
            config_components.push(ids);
        }

        let mut groups: Vec<Group> = Vec::new();
        for (idx, c) in components.iter().enumerate() {
            let gi = match groups.iter().position(|g| g.unit == c.unit && g.n == c.n) {
                Some(gi) => gi,
                None => {
                    groups.push(Group {
                        unit: c.unit,
                        n: c.n,
                        raws: Vec::new(),
                        baselines: Vec::new(),
                        members: Vec::new(),
                    });
                    groups.len() - 1
                }
            };
            let g = &mut groups[gi];
            let raw = index_of(&mut g.raws, (c.kind, c.smoothing));
            let base = c.norm.is_enabled().then(|| index_of(&mut g.baselines, (c.kind, c.norm)));
            g.members.push((idx, raw, base));
        }

        Self { components, configs: config_components, groups }
    }

    pub fn num_configs(&self) -> usize {
        self.configs.len()
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Ngram lengths (any unit) that need reference curves.
    pub fn zipf_lengths(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .components
            .iter()
            .filter(|c| matches!(c.kind, ScoreKind::Zipf { .. }))
            .map(|c| c.n)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Every component score for one document, indexed by component.
    pub fn score_text(&self, text: &str, zipf: &ZipfTable) -> Vec<Result<f64>> {
        let mut out: Vec<Result<f64>> = (0..self.components.len()).map(|_| Err(Error::EmptyGrid)).collect();
        for group in &self.groups {
            let dist = distribution(text, group.unit, group.n);
            if dist.is_empty() {
                for &(idx, _, _) in &group.members {
                    out[idx] = Err(Error::DocumentTooShort { n: group.n });
                }
                continue;
            }
            let raws: Vec<Result<f64>> = group
                .raws
                .iter()
                .map(|&(kind, smoothing)| raw_score(kind, &smoothing, &dist, group.n, zipf))
                .collect();
            let m_tilde_for = |norm: LengthNorm| scaled_length(dist.total_tokens() as f64, norm.alpha());
            let baselines: Vec<Result<f64>> = group
                .baselines
                .iter()
                .map(|&(kind, norm)| uniform_baseline_with(kind, group.n, m_tilde_for(norm), zipf))
                .collect();
            for &(idx, raw, base) in &group.members {
                out[idx] = match (&raws[raw], base) {
                    (Ok(r), Some(b)) => baselines[b].clone().and_then(|b| normalize(*r, b)),
                    (Ok(r), None) => Ok(*r),
                    (Err(e), _) => Err(e.clone()),
                };
            }
        }
        out
    }

    /// Mean of the configuration's per-length scores; the first failure wins.
    pub fn config_value(&self, config: usize, components: &[Result<f64>]) -> Result<f64> {
        let ids = &self.configs[config];
        let mut sum = 0.0;
        for &id in ids {
            sum += components[id].clone()?;
        }
        Ok(sum / ids.len() as f64)
    }
}

fn raw_score(
    kind: ScoreKind,
    smoothing: &SmoothingConfig,
    dist: &FrequencyDistribution,
    n: usize,
    zipf: &ZipfTable,
) -> Result<f64> {
    match kind {
        ScoreKind::Ttr => ttr_score(dist),
        ScoreKind::Moment(g) => moment_score(&smooth_and_clip(dist, smoothing)?, g),
        ScoreKind::Zipf { distance, renormalize } => {
            let p = smooth_and_clip(dist, smoothing)?;
            let reference = zipf.reference(n, p.len(), renormalize);
            zipf_score_against(&p, &reference, distance)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::NgramSpec;
    use crate::scores::{score_value, Distance, Nonlinearity};
    use alloc::vec;

    #[test]
    fn shared_components_are_deduplicated() {
        let c6 = NgramSpec::chars(6).unwrap();
        let c67 = NgramSpec::new(Unit::Character, [6, 7]).unwrap();
        let g = ScoreKind::Moment(Nonlinearity::Power(2.0));
        let configs = vec![ScoreConfig::new(g, c6.clone()), ScoreConfig::new(g, c67), ScoreConfig::new(ScoreKind::Ttr, c6)];
        let plan = ScorePlan::new(&configs);
        assert_eq!(plan.num_configs(), 3);
        assert_eq!(plan.num_components(), 3);
    }

    #[test]
    fn plan_matches_single_config_scoring() {
        let text = "Prices: apples 2.99, pears 2.99, plums 2.99, apples 2.99, pears 3.49.";
        let configs = vec![
            ScoreConfig::new(ScoreKind::Moment(Nonlinearity::Power(1.5)), NgramSpec::chars(4).unwrap()),
            ScoreConfig::new(ScoreKind::zipf(Distance::Squared), NgramSpec::new(Unit::Character, [3, 5]).unwrap())
                .with_lengthnorm(LengthNorm::Unbounded),
            ScoreConfig::new(ScoreKind::zipf(Distance::Jsd), NgramSpec::chars(3).unwrap()),
            ScoreConfig::new(ScoreKind::Ttr, NgramSpec::chars(2).unwrap()),
        ];
        let plan = ScorePlan::new(&configs);
        let table = ZipfTable::precompute(plan.zipf_lengths(), 500);
        let comps = plan.score_text(text, &table);
        for (i, cfg) in configs.iter().enumerate() {
            assert_eq!(plan.config_value(i, &comps).unwrap(), score_value(text, cfg).unwrap());
        }
    }
}
