//! `eval` and `tune` over a labelled benchmark.

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use cred_core::bench::make_task;
use cred_core::synth::synthetic_examples;
use cred_core::tuner::{config_values, evaluate_frozen, mean_and_stdev, rank_grid};
use cred_core::{bootstrap_ci, f1, p4, BinaryTask, GridSpec, Metric, Objective, ScoreConfig, Split, TaskExample, TaskKind};
use rayon::prelude::*;
use serde_json::json;

use super::docs::Scorer;
use super::{open_output, open_side_output, write_json};
use crate::bread::{load_bread, Columns, Format, MAX_CHARS};
use crate::config::{resolve, ScoreArgs};
use crate::error::CliError;
use crate::stream::thread_pool;

pub const BOOTSTRAP_ITERS: usize = 1000;
pub const SYNTHETIC_MIN_CHARS: usize = 100;
pub const SYNTHETIC_MAX_CHARS: usize = 5000;

/// Where labelled documents come from.
#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Labelled documents (JSONL, or TSV with a header).
    #[arg(long, value_name = "PATH", required_unless_present = "synthetic", conflicts_with = "synthetic")]
    pub bread: Option<PathBuf>,
    /// Generate this many clean and this many redundant documents instead.
    #[arg(long, value_name = "N")]
    pub synthetic: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// `repeat` (OK vs REP) or `noisy` (OK vs any noise label).
    #[arg(long, default_value = "repeat")]
    pub task: String,
    #[arg(long, default_value = "id")]
    pub id_column: String,
    #[arg(long, default_value = "text")]
    pub text_column: String,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    #[arg(long, default_value = "split")]
    pub split_column: String,
    #[arg(long, default_value = "language")]
    pub language_column: String,
    /// Seed for assigning splits to rows without one.
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
    /// Seed for bootstrap resampling and synthetic data.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl DataArgs {
    fn load(&self) -> anyhow::Result<BinaryTask> {
        let kind: TaskKind = self.task.parse().map_err(CliError::usage)?;
        if let Some(n) = self.synthetic {
            if n == 0 {
                return Err(CliError::usage("--synthetic needs at least one document per class").into());
            }
            let examples = synthetic_examples(n, n, SYNTHETIC_MIN_CHARS, SYNTHETIC_MAX_CHARS, self.seed);
            return Ok(BinaryTask { kind, examples });
        }
        let path = self.bread.as_ref().expect("clap requires --bread or --synthetic");
        let columns = Columns {
            id: self.id_column.clone(),
            text: self.text_column.clone(),
            label: self.label_column.clone(),
            split: self.split_column.clone(),
            language: self.language_column.clone(),
        };
        let format = self.format.unwrap_or_else(|| Format::from_path(path));
        let loaded = load_bread(path, format, &columns, self.split_seed)?;
        log::info!(
            "loaded {} documents from {} rows ({} unk dropped, {} malformed)",
            loaded.docs.len(),
            loaded.rows,
            loaded.dropped_unk,
            loaded.errors.len()
        );
        for e in &loaded.errors {
            log::warn!("line {}: {}", e.line, e.reason);
        }
        Ok(make_task(&loaded.docs, kind).map_err(CliError::data)?)
    }
}

fn split_checked(task: &BinaryTask, split: Split) -> Result<Vec<TaskExample>, CliError> {
    let part = task.split(split);
    if part.positives() == 0 || part.negatives() == 0 {
        return Err(CliError::data(format!(
            "{split} split needs both classes ({} clean, {} noisy)",
            part.positives(),
            part.negatives()
        )));
    }
    Ok(part.examples)
}

/// Config values for every example, scored in parallel.
fn score_examples(
    scorer: &Scorer,
    examples: &[TaskExample],
    pool: &rayon::ThreadPool,
) -> Vec<Vec<cred_core::Result<f64>>> {
    pool.install(|| examples.par_iter().map(|e| scorer.score(&e.text)).collect())
}

#[derive(Debug, Clone, Args)]
pub struct EvalCmd {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub score: ScoreArgs,
    /// Tune the threshold on the tune split instead of using the signature's.
    #[arg(long)]
    pub tune_threshold: bool,
    /// Objective for --tune-threshold: f1 or p4.
    #[arg(long, default_value = "f1")]
    pub objective: String,
    #[arg(long, default_value_t = BOOTSTRAP_ITERS)]
    pub bootstrap: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Test-split report for one classifier.
pub fn eval(cmd: &EvalCmd) -> anyhow::Result<()> {
    let mut cfg = resolve(&cmd.score)?.config;
    let objective: Objective = cmd.objective.parse().map_err(CliError::usage)?;
    if !cmd.tune_threshold && cfg.threshold.is_none() {
        return Err(CliError::usage("signature has no threshold; pass --threshold or --tune-threshold").into());
    }
    let task = cmd.data.load()?;
    let pool = thread_pool(cmd.data.jobs)?;
    let test = split_checked(&task, Split::Test)?;

    if cmd.tune_threshold {
        let tune = split_checked(&task, Split::Tune)?;
        let plain = cfg.clone().with_threshold(None);
        let scorer = Scorer::new(std::slice::from_ref(&plain), Some(MAX_CHARS));
        let values = score_examples(&scorer, &tune, &pool);
        let pairs: Vec<(f64, bool)> = values
            .into_iter()
            .zip(&tune)
            .map(|(mut v, e)| (v.remove(0).unwrap_or(f64::INFINITY), e.clean))
            .collect();
        let choice = cred_core::tune_threshold(&pairs, objective).map_err(CliError::data)?;
        cfg = plain.with_threshold(Some(choice.tau));
    }
    let tau = cfg.threshold.expect("set above");
    let scorer = Scorer::new(std::slice::from_ref(&cfg), Some(MAX_CHARS));
    let values: Vec<cred_core::Result<f64>> = score_examples(&scorer, &test, &pool).into_iter().map(|mut v| v.remove(0)).collect();
    let gold: Vec<bool> = test.iter().map(|e| e.clean).collect();
    let confusion = evaluate_frozen(&values, &gold, tau);
    let predicted: Vec<bool> = values.iter().map(|v| v.as_ref().is_ok_and(|v| cred_core::classify_value(*v, tau).is_clean())).collect();
    let ci = bootstrap_ci(&gold, &predicted, cmd.bootstrap, cmd.data.seed).map_err(CliError::data)?;
    let report = json!({
        "task": task.kind.as_str(),
        "signature": cfg.signature(),
        "threshold_source": if cmd.tune_threshold { "tuned" } else { "signature" },
        "confusion": {"tp": confusion.tp, "fp": confusion.fp, "tn": confusion.tn, "fn": confusion.fn_},
        "f1": f1(&confusion).map_err(CliError::data)?,
        "p4": p4(&confusion),
        "ci95": [ci.0, ci.1],
        "n_docs": test.len(),
        "unscorable": values.iter().filter(|v| v.is_err()).count(),
        "bootstrap_iters": cmd.bootstrap,
        "seed": cmd.data.seed,
    });
    write_json(&mut *open_output(&cmd.output)?, &report)
}

#[derive(Debug, Clone, Args)]
pub struct TuneCmd {
    #[command(flatten)]
    pub data: DataArgs,
    /// Constrained grid to search: ttr, moment, zipf or all.
    #[arg(long, default_value = "all")]
    pub preset: String,
    /// Restrict the grid to these ngram sets (`;`-separated, e.g. `c5;c6;c5,c6`).
    #[arg(long)]
    pub ngram_sets: Option<String>,
    /// f1 or p4.
    #[arg(long, default_value = "f1")]
    pub objective: String,
    /// Configurations averaged in the summary.
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    /// Ranked TSV destination (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Summary JSON destination (default: stderr).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

fn preset_grid(preset: &str) -> Result<Vec<GridSpec>, CliError> {
    let metrics: &[Metric] = match preset {
        "ttr" => &[Metric::Ttr],
        "moment" => &[Metric::Moment],
        "zipf" => &[Metric::Zipf],
        "all" => &[Metric::Ttr, Metric::Moment, Metric::Zipf],
        other => return Err(CliError::usage(format!("unknown preset `{other}` (ttr, moment, zipf, all)"))),
    };
    Ok(metrics.iter().map(|&m| GridSpec::constrained(m)).collect())
}

/// Grid search on the tune split, then every ranked configuration is frozen
/// and scored on the test split.
pub fn tune(cmd: &TuneCmd) -> anyhow::Result<()> {
    let objective: Objective = cmd.objective.parse().map_err(CliError::usage)?;
    let mut grids = preset_grid(&cmd.preset)?;
    if let Some(sets) = &cmd.ngram_sets {
        let sets = sets
            .split(';')
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::usage(format!("--ngram-sets: {e}")))?;
        grids = grids.into_iter().map(|g| g.with_ngram_sets(sets.clone())).collect();
    }
    let configs: Vec<ScoreConfig> = grids.iter().flat_map(GridSpec::configs).collect();
    let task = cmd.data.load()?;
    let tune = split_checked(&task, Split::Tune)?;
    let test = split_checked(&task, Split::Test)?;
    let pool = thread_pool(cmd.data.jobs)?;

    let start = std::time::Instant::now();
    let scorer = Scorer::new(&configs, Some(MAX_CHARS));
    let plan = scorer.plan();
    let tune_components: Vec<_> = pool.install(|| tune.par_iter().map(|e| scorer.components(&e.text)).collect());
    let gold: Vec<bool> = tune.iter().map(|e| e.clean).collect();
    let outcome = rank_grid(&configs, plan, &tune_components, &gold, objective).map_err(CliError::data)?;
    let test_components: Vec<_> = pool.install(|| test.par_iter().map(|e| scorer.components(&e.text)).collect());
    let test_gold: Vec<bool> = test.iter().map(|e| e.clean).collect();
    let index: HashMap<String, usize> = configs.iter().enumerate().map(|(i, c)| (c.signature(), i)).collect();

    let mut out = open_output(&cmd.output)?;
    writeln!(out, "rank\tsignature\ttune_objective\ttest_objective")?;
    let mut test_objectives = Vec::with_capacity(outcome.ranked.len());
    for (rank, entry) in outcome.ranked.iter().enumerate() {
        let i = index[&entry.config.clone().with_threshold(None).signature()];
        let tau = entry.config.threshold.expect("ranked configs carry a threshold");
        let confusion = evaluate_frozen(&config_values(plan, i, &test_components), &test_gold, tau);
        let test_objective = objective.evaluate(&confusion).map_err(CliError::data)?;
        test_objectives.push(test_objective);
        writeln!(out, "{}\t{}\t{}\t{}", rank + 1, entry.signature, entry.tune_objective, test_objective)?;
    }
    out.flush()?;

    let k = cmd.top_k.min(test_objectives.len());
    if k == 0 {
        return Err(CliError::data("no configuration could be ranked").into());
    }
    let (mean, stdev) = mean_and_stdev(&test_objectives[..k]);
    let skipped: Vec<_> = outcome
        .skipped
        .iter()
        .map(|s| json!({"signature": s.config.signature(), "failures": s.failures, "reason": s.reason.to_string()}))
        .collect();
    let summary = json!({
        "task": task.kind.as_str(),
        "objective": objective.name(),
        "preset": cmd.preset,
        "configs": configs.len(),
        "ranked": outcome.ranked.len(),
        "skipped": skipped,
        "tune_docs": tune.len(),
        "test_docs": test.len(),
        "top_k": k,
        "top_k_test_mean": mean,
        "top_k_test_stdev": stdev,
        "best": outcome.ranked.first().map(|r| r.signature.clone()),
        "seconds": start.elapsed().as_secs_f64(),
    });
    write_json(&mut *open_side_output(&cmd.summary)?, &summary)
}
