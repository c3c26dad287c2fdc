//! Resolution of the effective score configuration.
//!
//! The base configuration is the first of `--signature`, the config file's
//! `signature` key, `CRED_DEFAULT_SIGNATURE` and the shipped `moment-c6`
//! classifier. Individual fields from the config file are applied on top,
//! then individual flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use cred_core::{
    default_config, parse_signature, LengthNorm, Metric, NgramSpec, ScoreConfig, ScoreKind,
};

use crate::error::CliError;

pub const SIGNATURE_ENV: &str = "CRED_DEFAULT_SIGNATURE";
pub const BUILTIN_DEFAULT: &str = "moment-c6";

const FILE_KEYS: [&str; 11] =
    ["signature", "metric", "ngrams", "nl", "distance", "lambda", "epsilon", "topk", "alpha", "threshold", "max-chars"];

/// Flags shared by every command that scores text.
#[derive(Debug, Clone, Default, Args)]
pub struct ScoreArgs {
    /// Full signature to start from.
    #[arg(long)]
    pub signature: Option<String>,
    /// Flat `key=value` file; keys mirror the long flag names.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// ttr, moment or zipf.
    #[arg(long)]
    pub metric: Option<String>,
    /// Ngram lengths, e.g. `c6` or `c6,c7` (`w` for word ngrams).
    #[arg(long)]
    pub ngrams: Option<String>,
    /// Moment nonlinearity, e.g. `pow2`, `ent`, `sqent`.
    #[arg(long)]
    pub nl: Option<String>,
    /// Zipf distance, e.g. `sq`, `logabs:1e-6`, `jsd`; append `+norm` to renormalise the reference.
    #[arg(long)]
    pub distance: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of ngram types kept, or `inf`.
    #[arg(long)]
    pub topk: Option<String>,
    /// Length-normalisation asymptote, `inf` or `none`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Decision threshold, or `none`.
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<String>,
}

/// Field overrides gathered from one source.
#[derive(Debug, Clone, Default, PartialEq)]
struct Overrides {
    metric: Option<String>,
    ngrams: Option<String>,
    nl: Option<String>,
    distance: Option<String>,
    lambda: Option<String>,
    epsilon: Option<String>,
    topk: Option<String>,
    alpha: Option<String>,
    threshold: Option<String>,
}

impl Overrides {
    fn from_args(a: &ScoreArgs) -> Self {
        Self {
            metric: a.metric.clone(),
            ngrams: a.ngrams.clone(),
            nl: a.nl.clone(),
            distance: a.distance.clone(),
            lambda: a.lambda.map(|v| v.to_string()),
            epsilon: a.epsilon.map(|v| v.to_string()),
            topk: a.topk.clone(),
            alpha: a.alpha.clone(),
            threshold: a.threshold.clone(),
        }
    }

    fn from_file(map: &BTreeMap<String, String>) -> Self {
        let get = |k: &str| map.get(k).cloned();
        Self {
            metric: get("metric"),
            ngrams: get("ngrams"),
            nl: get("nl"),
            distance: get("distance"),
            lambda: get("lambda"),
            epsilon: get("epsilon"),
            topk: get("topk"),
            alpha: get("alpha"),
            threshold: get("threshold"),
        }
    }

    fn apply(&self, mut cfg: ScoreConfig) -> Result<ScoreConfig, CliError> {
        if let Some(m) = &self.metric {
            let metric: Metric = m.parse().map_err(|_| CliError::usage(format!("unknown metric `{m}`")))?;
            if metric != cfg.metric() {
                // a nonlinearity or threshold from another metric is meaningless here
                let kind = match metric {
                    Metric::Ttr => ScoreKind::Ttr,
                    Metric::Moment => ScoreKind::Moment(cred_core::Nonlinearity::Power(1.5)),
                    Metric::Zipf => ScoreKind::zipf(cred_core::Distance::Squared),
                };
                cfg = ScoreConfig::new(kind, cfg.ngrams.clone()).with_smoothing(cfg.smoothing);
            }
        }
        if let Some(n) = &self.ngrams {
            cfg.ngrams = n.parse::<NgramSpec>().map_err(|e| CliError::usage(format!("--ngrams: {e}")))?;
        }
        if let Some(nl) = &self.nl {
            if cfg.metric() == Metric::Zipf {
                return Err(CliError::usage("--nl applies to ttr/moment; use --distance for zipf"));
            }
            cfg.kind = ScoreKind::from_fields(cfg.metric(), nl).map_err(|e| CliError::usage(format!("--nl: {e}")))?;
        }
        if let Some(d) = &self.distance {
            if cfg.metric() != Metric::Zipf {
                return Err(CliError::usage("--distance applies to the zipf metric only"));
            }
            cfg.kind = ScoreKind::from_fields(Metric::Zipf, d).map_err(|e| CliError::usage(format!("--distance: {e}")))?;
        }
        if let Some(l) = &self.lambda {
            cfg.smoothing.lambda = parse_f64("lambda", l)?;
        }
        if let Some(e) = &self.epsilon {
            cfg.smoothing.epsilon = parse_f64("epsilon", e)?;
        }
        if let Some(k) = &self.topk {
            cfg.smoothing.top_k = match k.as_str() {
                "inf" => None,
                _ => Some(k.parse().map_err(|_| CliError::usage(format!("--topk: `{k}` is not a count")))?),
            };
        }
        if let Some(a) = &self.alpha {
            cfg.lengthnorm = a.parse::<LengthNorm>().map_err(|e| CliError::usage(format!("--alpha: {e}")))?;
        }
        if let Some(t) = &self.threshold {
            cfg.threshold = match t.as_str() {
                "none" => None,
                _ => Some(parse_f64("threshold", t)?),
            };
        }
        Ok(cfg)
    }
}

fn parse_f64(name: &str, s: &str) -> Result<f64, CliError> {
    s.parse::<f64>().map_err(|_| CliError::usage(format!("--{name}: `{s}` is not a number")))
}

/// Reads a flat `key=value` file. Blank lines and `#` comments are ignored.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", i + 1)))?;
        let k = k.trim();
        if !FILE_KEYS.contains(&k) {
            return Err(CliError::usage(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        map.insert(k.to_owned(), v.trim().to_owned());
    }
    Ok(map)
}

/// Effective configuration plus options the file may carry outside the signature.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub config: ScoreConfig,
    pub file_max_chars: Option<usize>,
}

pub fn resolve(args: &ScoreArgs) -> Result<Resolved, CliError> {
    resolve_with_env(args, std::env::var(SIGNATURE_ENV).ok().as_deref())
}

/// [`resolve`] with the environment default passed in, for testing.
pub fn resolve_with_env(args: &ScoreArgs, env_signature: Option<&str>) -> Result<Resolved, CliError> {
    let file = match &args.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let base = match (&args.signature, file.get("signature"), env_signature.filter(|s| !s.is_empty())) {
        (Some(s), _, _) => parse_base(s, "--signature")?,
        (None, Some(s), _) => parse_base(s, "config signature")?,
        (None, None, Some(s)) => parse_base(s, SIGNATURE_ENV)?,
        (None, None, None) => default_config(BUILTIN_DEFAULT).expect("shipped default exists"),
    };
    let cfg = Overrides::from_file(&file).apply(base)?;
    let cfg = Overrides::from_args(args).apply(cfg)?;
    cfg.validate().map_err(CliError::usage)?;
    let file_max_chars = match file.get("max-chars") {
        Some(v) => Some(v.parse().map_err(|_| CliError::usage(format!("config max-chars: `{v}` is not a count")))?),
        None => None,
    };
    Ok(Resolved { config: cfg, file_max_chars })
}

/// Accepts a full signature or the name of a shipped configuration.
pub fn parse_base(s: &str, source: &str) -> Result<ScoreConfig, CliError> {
    if let Some(cfg) = default_config(s) {
        return Ok(cfg);
    }
    parse_signature(s).map_err(|e| CliError::usage(format!("{source}: {e}")))
}
