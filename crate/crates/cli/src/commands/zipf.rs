//! `zipf`, `fit-zipf` and `defaults`.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::Args;
use cred_core::zipf::zipf_reference_renormalized;
use cred_core::{default_signatures, fit_zipf_params, zipf_reference, RgdConfig};
use serde_json::json;

use super::{open_input, open_output, write_json};
use crate::error::CliError;

#[derive(Debug, Clone, Args)]
pub struct ZipfCmd {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub ranks: usize,
    /// Rescale the curve to sum to one over the printed ranks.
    #[arg(long)]
    pub renormalize: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Prints `rank<TAB>frequency` rows of the reference curve.
pub fn zipf(cmd: &ZipfCmd) -> anyhow::Result<()> {
    let curve = if cmd.renormalize {
        zipf_reference_renormalized(cmd.n, cmd.ranks)
    } else {
        zipf_reference(cmd.n, cmd.ranks)
    }
    .map_err(CliError::usage)?;
    let mut out = open_output(&cmd.output)?;
    writeln!(out, "rank\tfrequency")?;
    for (i, f) in curve.iter().enumerate() {
        writeln!(out, "{}\t{f}", i + 1)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct FitZipfCmd {
    /// TSV with columns n, rank, frequency (a header row is optional).
    #[arg(long, value_name = "PATH")]
    pub empirical: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = RgdConfig::default().lr)]
    pub lr: f64,
    #[arg(long, default_value_t = RgdConfig::default().branch_n)]
    pub branch_n: usize,
    #[arg(long, default_value_t = RgdConfig::default().max_steps)]
    pub max_steps: usize,
    #[arg(long, default_value_t = RgdConfig::default().max_attempts)]
    pub max_attempts: usize,
    #[arg(long, default_value_t = RgdConfig::default().max_flat)]
    pub max_flat: usize,
    #[arg(long, short = 'o', alias = "output")]
    pub out: Option<PathBuf>,
}

/// Parses `n rank frequency` rows; the first row may be a header.
pub fn read_empirical(reader: impl BufRead) -> Result<Vec<(usize, usize, f64)>, CliError> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::data(format!("read error at line {}: {e}", i + 1)))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let parsed = match fields[..] {
            [n, r, f] => n.parse().ok().zip(r.parse().ok()).zip(f.parse().ok()).map(|((n, r), f)| (n, r, f)),
            _ => None,
        };
        match parsed {
            Some(row) => rows.push(row),
            None if i == 0 => continue,
            None => return Err(CliError::data(format!("line {}: expected `n<TAB>rank<TAB>frequency`", i + 1))),
        }
    }
    Ok(rows)
}

pub fn fit_zipf(cmd: &FitZipfCmd) -> anyhow::Result<()> {
    let rows = read_empirical(open_input(&Some(cmd.empirical.clone()))?)?;
    let cfg = RgdConfig {
        lr: cmd.lr,
        branch_n: cmd.branch_n,
        max_steps: cmd.max_steps,
        max_attempts: cmd.max_attempts,
        max_flat: cmd.max_flat,
        seed: cmd.seed,
    };
    cfg.validate().map_err(CliError::usage)?;
    let fit = fit_zipf_params(&rows, &cfg).map_err(CliError::data)?;
    let p = fit.params;
    let report = json!({
        "b_scale": p.b_scale, "b_shift": p.b_shift, "b_exp": p.b_exp, "b_floor": p.b_floor,
        "s_scale": p.s_scale, "s_shift": p.s_shift, "s_exp": p.s_exp, "s_floor": p.s_floor,
        "loss": fit.loss,
        "initial_loss": fit.initial_loss,
        "steps": fit.result.steps,
        "evaluations": fit.result.evaluations,
        "rows": rows.len(),
        "seed": cmd.seed,
    });
    write_json(&mut *open_output(&cmd.out)?, &report)
}

/// Prints the shipped classifiers as `name<TAB>signature`.
pub fn defaults(output: &Option<PathBuf>) -> anyhow::Result<()> {
    let mut out = open_output(output)?;
    for (name, sig) in default_signatures() {
        writeln!(out, "{name}\t{sig}")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empirical_header_optional() {
        let rows = read_empirical("n\trank\tfrequency\n1\t1\t0.1\n1\t2\t0.05\n".as_bytes()).unwrap();
        assert_eq!(rows, vec![(1, 1, 0.1), (1, 2, 0.05)]);
        assert!(read_empirical("1\t1\t0.1\n1\tx\t0.1\n".as_bytes()).is_err());
    }
}
