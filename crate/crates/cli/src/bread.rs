//! Loading labelled benchmark documents from JSONL or TSV.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use cred_core::bench::{seeded_splits, Label, LabeledDocument, Split};
use cred_core::ngram::cap_chars;
use serde_json::Value;

use crate::error::CliError;

/// Documents are truncated to this many characters at load time.
pub const MAX_CHARS: usize = 5000;

/// Loading aborts when more than this fraction of rows is malformed.
pub const MAX_BAD_ROW_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Jsonl,
    Tsv,
}

impl Format {
    /// `.tsv` files are TSV, everything else JSONL.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") => Format::Tsv,
            _ => Format::Jsonl,
        }
    }
}

/// Field (JSONL) or header (TSV) names of each column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Columns {
    pub id: String,
    pub text: String,
    pub label: String,
    pub split: String,
    pub language: String,
}

impl Default for Columns {
    fn default() -> Self {
        Self {
            id: "id".into(),
            text: "text".into(),
            label: "label".into(),
            split: "split".into(),
            language: "language".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Loaded {
    pub docs: Vec<LabeledDocument>,
    /// Data rows seen, including dropped and malformed ones.
    pub rows: usize,
    pub dropped_unk: usize,
    pub errors: Vec<RowError>,
}

pub fn load_bread(path: &Path, format: Format, columns: &Columns, split_seed: u64) -> Result<Loaded, CliError> {
    let file = File::open(path).map_err(|e| CliError::data(format!("cannot open {}: {e}", path.display())))?;
    load_reader(BufReader::new(file), format, columns, split_seed)
}

/// Parses all rows. Documents without a split get a seeded 50/50 assignment.
pub fn load_reader<R: Read>(reader: R, format: Format, columns: &Columns, split_seed: u64) -> Result<Loaded, CliError> {
    let mut loaded = Loaded::default();
    let mut pending: Vec<(LabeledDocument, bool)> = Vec::new();
    let mut handle = |line: usize, fields: Result<RawRow, String>, loaded: &mut Loaded| {
        loaded.rows += 1;
        match fields.and_then(|row| row.into_document(line)) {
            Ok(Some(doc)) => pending.push(doc),
            Ok(None) => loaded.dropped_unk += 1,
            Err(reason) => loaded.errors.push(RowError { line, reason }),
        }
    };
    match format {
        Format::Jsonl => {
            for (i, line) in BufReader::new(reader).lines().enumerate() {
                let line = line.map_err(|e| CliError::data(format!("read error at line {}: {e}", i + 1)))?;
                if line.trim().is_empty() {
                    continue;
                }
                handle(i + 1, RawRow::from_json(&line, columns), &mut loaded);
            }
        }
        Format::Tsv => {
            let mut rdr = csv::ReaderBuilder::new().delimiter(b'\t').quoting(false).flexible(true).from_reader(reader);
            let headers = rdr.headers().map_err(|e| CliError::data(format!("bad TSV header: {e}")))?.clone();
            let col = |name: &str| headers.iter().position(|h| h == name);
            let idx = [col(&columns.id), col(&columns.text), col(&columns.label), col(&columns.split), col(&columns.language)];
            if idx[1].is_none() || idx[2].is_none() {
                return Err(CliError::data(format!(
                    "TSV header must contain `{}` and `{}` columns",
                    columns.text, columns.label
                )));
            }
            for record in rdr.records() {
                let record = record.map_err(|e| CliError::data(format!("TSV read error: {e}")))?;
                let line = record.position().map_or(0, |p| p.line() as usize);
                let get = |i: Option<usize>| i.and_then(|i| record.get(i)).map(str::to_owned);
                let row = RawRow {
                    id: get(idx[0]),
                    text: get(idx[1]),
                    label: get(idx[2]),
                    split: get(idx[3]).filter(|s| !s.is_empty()),
                    language: get(idx[4]).filter(|s| !s.is_empty()),
                };
                handle(line, Ok(row), &mut loaded);
            }
        }
    }

    if loaded.errors.len() as f64 > MAX_BAD_ROW_FRACTION * loaded.rows as f64 {
        let first = &loaded.errors[0];
        return Err(CliError::data(format!(
            "{} of {} rows are malformed (line {}: {})",
            loaded.errors.len(),
            loaded.rows,
            first.line,
            first.reason
        )));
    }

    let unsplit: Vec<usize> = pending.iter().enumerate().filter(|(_, (_, has))| !has).map(|(i, _)| i).collect();
    for (slot, split) in unsplit.iter().zip(seeded_splits(unsplit.len(), split_seed)) {
        pending[*slot].0.split = split;
    }
    loaded.docs = pending.into_iter().map(|(d, _)| d).collect();
    Ok(loaded)
}

struct RawRow {
    id: Option<String>,
    text: Option<String>,
    label: Option<String>,
    split: Option<String>,
    language: Option<String>,
}

fn json_string(v: Option<&Value>) -> Option<String> {
    match v? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

impl RawRow {
    fn from_json(line: &str, c: &Columns) -> Result<RawRow, String> {
        let v: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
        let obj = v.as_object().ok_or("expected a JSON object")?;
        Ok(RawRow {
            id: json_string(obj.get(&c.id)),
            text: json_string(obj.get(&c.text)),
            label: json_string(obj.get(&c.label)),
            split: json_string(obj.get(&c.split)),
            language: json_string(obj.get(&c.language)),
        })
    }

    /// `Ok(None)` for `unk` rows; the flag tells whether the row carried a split.
    fn into_document(self, line: usize) -> Result<Option<(LabeledDocument, bool)>, String> {
        let label = self.label.ok_or("missing label")?;
        let Some(label) = Label::parse(&label).map_err(|_| format!("unknown label `{label}`"))? else {
            return Ok(None);
        };
        let text = self.text.ok_or("missing text")?;
        if text.trim().is_empty() {
            return Err("empty text".into());
        }
        let split = match self.split {
            Some(s) => Some(s.parse::<Split>().map_err(|_| format!("unknown split `{s}`"))?),
            None => None,
        };
        let doc = LabeledDocument {
            id: self.id.unwrap_or_else(|| format!("line-{line}")),
            text: cap_chars(&text, MAX_CHARS).to_owned(),
            label,
            split: split.unwrap_or(Split::Tune),
            language: self.language,
        };
        Ok(Some((doc, split.is_some())))
    }
}
