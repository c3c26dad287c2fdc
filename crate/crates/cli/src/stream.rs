//! Order-preserving parallel processing of line-oriented input.
//!
//! Lines are read in fixed-size chunks, each chunk is mapped on the worker
//! pool and the results are handed to the sink in input order before the
//! next chunk is read, so memory stays bounded by the chunk size.

use std::io::BufRead;

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::CliError;

/// Lines read per parallel batch.
pub const CHUNK_LINES: usize = 1024;

/// One non-blank input line. Invalid UTF-8 is kept as an error for the worker to report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    /// 1-based physical line number.
    pub number: usize,
    pub content: Result<String, String>,
}

pub fn thread_pool(jobs: Option<usize>) -> Result<ThreadPool, CliError> {
    if jobs == Some(0) {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))
}

/// Maps every non-blank line with `work` in parallel and feeds `(line, result)`
/// to `sink` in input order. Returns the number of lines processed.
pub fn process_lines<R, T, W, S>(mut reader: R, pool: &ThreadPool, chunk: usize, work: W, mut sink: S) -> anyhow::Result<usize>
where
    R: BufRead,
    T: Send,
    W: Fn(&Line) -> T + Sync,
    S: FnMut(&Line, T) -> anyhow::Result<()>,
{
    let chunk = chunk.max(1);
    let mut number = 0;
    let mut total = 0;
    let mut buf = Vec::new();
    loop {
        let mut batch = Vec::with_capacity(chunk);
        let mut eof = false;
        while batch.len() < chunk {
            buf.clear();
            let read = reader
                .read_until(b'\n', &mut buf)
                .map_err(|e| CliError::data(format!("read error after line {number}: {e}")))?;
            if read == 0 {
                eof = true;
                break;
            }
            number += 1;
            while matches!(buf.last(), Some(b'\n' | b'\r')) {
                buf.pop();
            }
            if buf.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            let content = String::from_utf8(buf.clone()).map_err(|_| "invalid UTF-8".to_owned());
            batch.push(Line { number, content });
        }
        let results: Vec<T> = pool.install(|| batch.par_iter().map(&work).collect());
        total += batch.len();
        for (line, result) in batch.iter().zip(results) {
            sink(line, result)?;
        }
        if eof {
            return Ok(total);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_across_chunks() {
        let input: String = (0..100).map(|i| format!("{i}\n\n")).collect();
        let pool = thread_pool(Some(4)).unwrap();
        let mut seen = Vec::new();
        let n = process_lines(input.as_bytes(), &pool, 7, |l| l.content.clone().unwrap().parse::<usize>().unwrap() * 2, |l, v| {
            seen.push((l.number, v));
            Ok(())
        })
        .unwrap();
        assert_eq!(n, 100);
        let expected: Vec<(usize, usize)> = (0..100).map(|i| (2 * i + 1, 2 * i)).collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn invalid_utf8_and_crlf() {
        let input: &[u8] = b"ok\r\n\xff\xfe\n";
        let pool = thread_pool(Some(1)).unwrap();
        let mut lines = Vec::new();
        process_lines(input, &pool, 10, |l| l.clone(), |_, l| {
            lines.push(l);
            Ok(())
        })
        .unwrap();
        assert_eq!(lines[0].content.as_deref(), Ok("ok"));
        assert!(lines[1].content.is_err());
    }

    #[test]
    fn zero_jobs_rejected() {
        assert!(thread_pool(Some(0)).is_err());
    }
}
