//! Commands that stream JSONL documents: `score`, `filter` and `aggregate`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use cred_core::ngram::cap_chars;
use cred_core::{classify_value, default_config, ScoreConfig, ScorePlan, ZipfTable};
use serde_json::{json, Map, Value};

use super::{open_input, open_output, open_side_output, write_json, IoArgs};
use crate::bread::MAX_CHARS;
use crate::config::{parse_base, resolve, ScoreArgs};
use crate::error::CliError;
use crate::stream::{process_lines, thread_pool, Line, CHUNK_LINES};

/// Commands fail with a data error when more than this share of lines is malformed.
pub const MAX_MALFORMED_FRACTION: f64 = 0.01;

/// Options shared by the streaming commands.
#[derive(Debug, Clone, Default, Args)]
pub struct StreamArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Where per-line problems go as JSONL (default: stderr).
    #[arg(long)]
    pub errors: Option<PathBuf>,
    /// Truncate documents to this many characters; 0 disables the cap [default: 5000].
    #[arg(long)]
    pub max_chars: Option<usize>,
    #[arg(long, default_value = "text")]
    pub text_field: String,
    #[arg(long, default_value = "id")]
    pub id_field: String,
    /// Worker threads (default: available CPUs).
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl StreamArgs {
    fn cap(&self, file_max_chars: Option<usize>) -> Option<usize> {
        match self.max_chars.or(file_max_chars).unwrap_or(MAX_CHARS) {
            0 => None,
            n => Some(n),
        }
    }
}

/// Scores a batch of configurations over documents.
pub struct Scorer {
    plan: ScorePlan,
    table: ZipfTable,
    cap: Option<usize>,
}

impl Scorer {
    pub fn new(configs: &[ScoreConfig], cap: Option<usize>) -> Self {
        let plan = ScorePlan::new(configs);
        let table = ZipfTable::precompute(plan.zipf_lengths(), cap.unwrap_or(MAX_CHARS));
        Self { plan, table, cap }
    }

    pub fn plan(&self) -> &ScorePlan {
        &self.plan
    }

    /// Per-component scores of the capped text, indexed like the plan's components.
    pub fn components(&self, text: &str) -> Vec<cred_core::Result<f64>> {
        let text = match self.cap {
            Some(n) => cap_chars(text, n),
            None => text,
        };
        self.plan.score_text(text, &self.table)
    }

    /// One value per configuration.
    pub fn score(&self, text: &str) -> Vec<cred_core::Result<f64>> {
        let components = self.components(text);
        (0..self.plan.num_configs())
            .map(|i| {
                self.plan.config_value(i, &components).and_then(|v| {
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(cred_core::Error::InvalidConfig(format!("non-finite score {v}")))
                    }
                })
            })
            .collect()
    }
}

/// What happened to one input line.
pub enum Outcome {
    Scored { record: Map<String, Value>, values: Vec<cred_core::Result<f64>> },
    /// The record parsed but was skipped; `values` is empty for empty text.
    Skipped { record: Map<String, Value>, kind: &'static str, reason: String },
    Malformed(String),
}

fn parse_record(line: &Line, text_field: &str) -> Result<(Map<String, Value>, String), String> {
    let content = line.content.as_deref().map_err(|e| e.clone())?;
    let value: Value = serde_json::from_str(content).map_err(|e| format!("invalid JSON: {e}"))?;
    let Value::Object(record) = value else {
        return Err("expected a JSON object".into());
    };
    let text = match record.get(text_field) {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(format!("field `{text_field}` is not a string")),
        None => return Err(format!("missing field `{text_field}`")),
    };
    Ok((record, text))
}

fn evaluate(line: &Line, text_field: &str, scorer: &Scorer) -> Outcome {
    let (record, text) = match parse_record(line, text_field) {
        Ok(r) => r,
        Err(reason) => return Outcome::Malformed(reason),
    };
    if text.trim().is_empty() {
        return Outcome::Skipped { record, kind: "empty", reason: "empty text".into() };
    }
    Outcome::Scored { record, values: scorer.score(&text) }
}

/// Per-line error stream plus malformed-line accounting.
struct ErrorLog {
    out: Box<dyn Write>,
    id_field: String,
    lines: usize,
    malformed: usize,
}

impl ErrorLog {
    fn new(path: &Option<PathBuf>, id_field: &str) -> Result<Self, CliError> {
        Ok(Self { out: open_side_output(path)?, id_field: id_field.to_owned(), lines: 0, malformed: 0 })
    }

    fn report(&mut self, line: usize, record: Option<&Map<String, Value>>, kind: &str, reason: &str) -> anyhow::Result<()> {
        if kind == "malformed" {
            self.malformed += 1;
        }
        let id = record.and_then(|r| r.get(&self.id_field)).cloned().unwrap_or(Value::Null);
        let entry = json!({"line": line, "id": id, "kind": kind, "reason": reason});
        writeln!(self.out, "{entry}")?;
        Ok(())
    }

    /// Data error if too many lines were malformed.
    fn finish(mut self) -> anyhow::Result<()> {
        self.out.flush()?;
        if self.malformed as f64 > MAX_MALFORMED_FRACTION * self.lines as f64 {
            return Err(CliError::data(format!("{} of {} lines are malformed", self.malformed, self.lines)).into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScoreCmd {
    #[command(flatten)]
    pub stream: StreamArgs,
    #[command(flatten)]
    pub score: ScoreArgs,
}

/// Appends a `cred` object to every record that can be scored.
pub fn score(cmd: &ScoreCmd) -> anyhow::Result<()> {
    let resolved = resolve(&cmd.score)?;
    let cfg = resolved.config;
    let signature = cfg.signature();
    let metric = cfg.metric().to_string();
    let scorer = Scorer::new(std::slice::from_ref(&cfg), cmd.stream.cap(resolved.file_max_chars));
    let pool = thread_pool(cmd.stream.jobs)?;
    let mut out = open_output(&cmd.stream.io.output)?;
    let mut errors = ErrorLog::new(&cmd.stream.errors, &cmd.stream.id_field)?;
    let text_field = cmd.stream.text_field.as_str();

    errors.lines = process_lines(
        open_input(&cmd.stream.io.input)?,
        &pool,
        CHUNK_LINES,
        |line| evaluate(line, text_field, &scorer),
        |line, outcome| match outcome {
            Outcome::Scored { mut record, mut values } => match values.remove(0) {
                Ok(value) => {
                    record.insert("cred".into(), json!({"value": value, "metric": metric, "signature": signature}));
                    writeln!(out, "{}", Value::Object(record))?;
                    Ok(())
                }
                Err(e) => errors.report(line.number, Some(&record), "unscorable", &e.to_string()),
            },
            Outcome::Skipped { record, kind, reason } => errors.report(line.number, Some(&record), kind, &reason),
            Outcome::Malformed(reason) => errors.report(line.number, None, "malformed", &reason),
        },
    )?;
    out.flush()?;
    errors.finish()
}

#[derive(Debug, Clone, Args)]
pub struct FilterCmd {
    #[command(flatten)]
    pub stream: StreamArgs,
    #[command(flatten)]
    pub score: ScoreArgs,
    /// Where the summary JSON goes (default: stderr).
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Optional destination for dropped lines.
    #[arg(long)]
    pub rejected: Option<PathBuf>,
}

#[derive(Debug, Default)]
struct ClassStats {
    count: usize,
    scored: usize,
    sum: f64,
}

impl ClassStats {
    fn mean(&self) -> Value {
        if self.scored == 0 {
            Value::Null
        } else {
            json!(self.sum / self.scored as f64)
        }
    }
}

/// Keeps records classified clean, verbatim. Empty or unscorable records are dropped.
pub fn filter(cmd: &FilterCmd) -> anyhow::Result<()> {
    let resolved = resolve(&cmd.score)?;
    let cfg = resolved.config;
    let tau = cfg
        .threshold
        .ok_or_else(|| CliError::usage(format!("filter needs a threshold; `{}` has none", cfg.signature())))?;
    let scorer = Scorer::new(std::slice::from_ref(&cfg), cmd.stream.cap(resolved.file_max_chars));
    let pool = thread_pool(cmd.stream.jobs)?;
    let mut out = open_output(&cmd.stream.io.output)?;
    let mut rejected = match &cmd.rejected {
        Some(p) => Some(open_output(&Some(p.clone()))?),
        None => None,
    };
    let mut errors = ErrorLog::new(&cmd.stream.errors, &cmd.stream.id_field)?;
    let (mut kept, mut dropped) = (ClassStats::default(), ClassStats::default());
    let text_field = cmd.stream.text_field.as_str();

    errors.lines = process_lines(
        open_input(&cmd.stream.io.input)?,
        &pool,
        CHUNK_LINES,
        |line| evaluate(line, text_field, &scorer),
        |line, outcome| {
            let raw = line.content.as_deref().unwrap_or_default();
            let value = match outcome {
                Outcome::Malformed(reason) => return errors.report(line.number, None, "malformed", &reason),
                Outcome::Skipped { record, kind, reason } => {
                    errors.report(line.number, Some(&record), kind, &reason)?;
                    None
                }
                Outcome::Scored { record, mut values } => match values.remove(0) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        errors.report(line.number, Some(&record), "unscorable", &e.to_string())?;
                        None
                    }
                },
            };
            let clean = value.is_some_and(|v| classify_value(v, tau).is_clean());
            let stats = if clean { &mut kept } else { &mut dropped };
            stats.count += 1;
            if let Some(v) = value {
                stats.scored += 1;
                stats.sum += v;
            }
            if clean {
                writeln!(out, "{raw}")?;
            } else if let Some(r) = rejected.as_mut() {
                writeln!(r, "{raw}")?;
            }
            Ok(())
        },
    )?;
    out.flush()?;
    if let Some(r) = rejected.as_mut() {
        r.flush()?;
    }
    let summary = json!({
        "signature": cfg.signature(),
        "records": kept.count + dropped.count,
        "kept": kept.count,
        "dropped": dropped.count,
        "malformed": errors.malformed,
        "mean_score": {"kept": kept.mean(), "dropped": dropped.mean()},
    });
    write_json(&mut *open_side_output(&cmd.stats)?, &summary).context("writing filter stats")?;
    errors.finish()
}

#[derive(Debug, Clone, Args)]
pub struct AggregateCmd {
    #[command(flatten)]
    pub stream: StreamArgs,
    /// Record field to group by; records without it fall into `unknown`.
    #[arg(long, default_value = "group")]
    pub group_by: String,
    /// Configuration to average (repeatable; shipped names allowed).
    /// Defaults to ttr-c6, moment-c6 and zipf-c5.
    #[arg(long = "signature")]
    pub signatures: Vec<String>,
}

pub const AGGREGATE_DEFAULTS: [&str; 3] = ["ttr-c6", "moment-c6", "zipf-c5"];

#[derive(Debug, Clone, Default)]
struct GroupSums {
    count: usize,
    sums: Vec<f64>,
    scored: Vec<usize>,
}

fn group_key(record: &Map<String, Value>, key: &str) -> String {
    match record.get(key) {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Null) | None => "unknown".into(),
        Some(other) => other.to_string(),
    }
}

/// Per-group document counts and mean scores as TSV, one column per configuration.
/// Documents a configuration cannot score are left out of that column's mean.
pub fn aggregate(cmd: &AggregateCmd) -> anyhow::Result<()> {
    let configs: Vec<ScoreConfig> = if cmd.signatures.is_empty() {
        AGGREGATE_DEFAULTS.iter().map(|n| default_config(n).expect("shipped default")).collect()
    } else {
        cmd.signatures.iter().map(|s| parse_base(s, "--signature")).collect::<Result<_, _>>()?
    };
    let scorer = Scorer::new(&configs, cmd.stream.cap(None));
    let pool = thread_pool(cmd.stream.jobs)?;
    let mut errors = ErrorLog::new(&cmd.stream.errors, &cmd.stream.id_field)?;
    let mut groups: BTreeMap<String, GroupSums> = BTreeMap::new();
    let text_field = cmd.stream.text_field.as_str();
    let empty = GroupSums { count: 0, sums: vec![0.0; configs.len()], scored: vec![0; configs.len()] };

    errors.lines = process_lines(
        open_input(&cmd.stream.io.input)?,
        &pool,
        CHUNK_LINES,
        |line| evaluate(line, text_field, &scorer),
        |line, outcome| {
            let (record, values) = match outcome {
                Outcome::Malformed(reason) => return errors.report(line.number, None, "malformed", &reason),
                Outcome::Skipped { record, kind, reason } => {
                    errors.report(line.number, Some(&record), kind, &reason)?;
                    (record, Vec::new())
                }
                Outcome::Scored { record, values } => (record, values),
            };
            let g = groups.entry(group_key(&record, &cmd.group_by)).or_insert_with(|| empty.clone());
            g.count += 1;
            for (i, v) in values.iter().enumerate() {
                if let Ok(v) = v {
                    g.sums[i] += v;
                    g.scored[i] += 1;
                }
            }
            Ok(())
        },
    )?;

    let mut out = open_output(&cmd.stream.io.output)?;
    let header: Vec<String> = configs.iter().map(ScoreConfig::signature).collect();
    writeln!(out, "group\tcount\t{}", header.join("\t"))?;
    for (name, g) in &groups {
        let means: Vec<String> = (0..configs.len())
            .map(|i| if g.scored[i] == 0 { "nan".into() } else { (g.sums[i] / g.scored[i] as f64).to_string() })
            .collect();
        writeln!(out, "{name}\t{}\t{}", g.count, means.join("\t"))?;
    }
    out.flush()?;
    errors.finish()
}
