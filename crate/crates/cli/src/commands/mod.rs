pub mod bench;
pub mod docs;
pub mod zipf;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;

use crate::error::CliError;

/// Input/output locations. `-` or an absent path means stdin/stdout.
#[derive(Debug, Clone, Default, Args)]
pub struct IoArgs {
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn is_std(path: &Option<PathBuf>) -> bool {
    path.as_deref().is_none_or(|p| p == Path::new("-"))
}

pub fn open_input(path: &Option<PathBuf>) -> Result<Box<dyn BufRead>, CliError> {
    if is_std(path) {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let p = path.as_deref().expect("checked above");
    let f = File::open(p).map_err(|e| CliError::data(format!("cannot open {}: {e}", p.display())))?;
    Ok(Box::new(BufReader::new(f)))
}

pub fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    if is_std(path) {
        return Ok(Box::new(BufWriter::new(io::stdout())));
    }
    create(path.as_deref().expect("checked above"))
}

/// Like [`open_output`] but defaulting to stderr.
pub fn open_side_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(io::stderr())),
        Some(p) if p == Path::new("-") => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) => create(p),
    }
}

fn create(p: &Path) -> Result<Box<dyn Write>, CliError> {
    let f = File::create(p).map_err(|e| CliError::usage(format!("cannot create {}: {e}", p.display())))?;
    Ok(Box::new(BufWriter::new(f)))
}

/// Serialises `value` as pretty JSON followed by a newline.
pub fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
