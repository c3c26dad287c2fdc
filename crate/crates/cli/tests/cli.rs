use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use cred_core::synth::{noisy_document, repeated_line, NoisyKind, Vocabulary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn cred(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cred"))
        .args(args)
        .env_remove("CRED_DEFAULT_SIGNATURE")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn jsonl(records: &[Value]) -> String {
    records.iter().map(|r| format!("{r}\n")).collect()
}

fn prose_docs(n: usize, seed: u64) -> Vec<String> {
    let vocab = Vocabulary::new(5000, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| vocab.prose(&mut rng, 400 + 37 * i)).collect()
}

#[test]
fn score_preserves_order_and_appends_signature() {
    let docs = prose_docs(40, 1);
    let input = jsonl(&docs.iter().enumerate().map(|(i, t)| json!({"id": i, "text": t})).collect::<Vec<_>>());
    let out = cred(&["score", "--jobs", "4"], &input);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 40);
    for (i, line) in lines.iter().enumerate() {
        assert_eq!(line["id"], json!(i));
        let sig = line["cred"]["signature"].as_str().unwrap();
        assert!(cred_core::parse_signature(sig).is_ok());
        assert_eq!(line["cred"]["metric"], "moment");
        let expected = cred_core::score_value(&docs[i], &cred_core::parse_signature(sig).unwrap()).unwrap();
        assert_eq!(line["cred"]["value"].as_f64().unwrap(), expected);
    }
}

#[test]
fn score_is_deterministic_across_job_counts() {
    let docs = prose_docs(30, 2);
    let input = jsonl(&docs.iter().map(|t| json!({"text": t})).collect::<Vec<_>>());
    let a = cred(&["score", "--jobs", "1", "--metric", "zipf"], &input);
    let b = cred(&["score", "--jobs", "3", "--metric", "zipf"], &input);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn empty_text_goes_to_error_stream() {
    let dir = tempfile::tempdir().unwrap();
    let errors = dir.path().join("errors.jsonl");
    let input = jsonl(&[json!({"id": "a", "text": "some ordinary words here"}), json!({"id": "b", "text": ""})]);
    let out = cred(&["score", "--errors", errors.to_str().unwrap()], &input);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1);
    let err: Value = serde_json::from_str(std::fs::read_to_string(&errors).unwrap().trim()).unwrap();
    assert_eq!(err, json!({"line": 2, "id": "b", "kind": "empty", "reason": "empty text"}));
}

#[test]
fn malformed_lines_above_one_percent_exit_2() {
    let mut records: Vec<String> = (0..200).map(|i| json!({"text": format!("document number {i} text")}).to_string()).collect();
    records.push("{broken".into());
    records.push("[1,2]".into());
    let out = cred(&["score", "--errors", "/dev/null"], &records.join("\n"));
    assert_eq!(out.status.code(), Some(0), "2 of 202 is under 1%");
    records.push("nope".into());
    let out = cred(&["score", "--errors", "/dev/null"], &records.join("\n"));
    assert_eq!(out.status.code(), Some(2));
    // valid records are still written
    assert_eq!(stdout(&out).lines().count(), 200);
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(cred(&["score", "--metric", "bleu"], "").status.code(), Some(1));
    assert_eq!(cred(&["score", "--signature", "cred|m:ttr"], "").status.code(), Some(1));
    assert_eq!(cred(&["frobnicate"], "").status.code(), Some(1));
    assert_eq!(cred(&["filter", "--threshold", "none"], "").status.code(), Some(1));
    assert_eq!(cred(&["--help"], "").status.code(), Some(0));
    assert_eq!(cred(&["--version"], "").status.code(), Some(0));
    assert_eq!(cred(&["score", "--input", "/nonexistent/file.jsonl"], "").status.code(), Some(2));
}

#[test]
fn env_signature_is_the_default_classifier() {
    let sig = "cred|m:ttr|n:c3|nl:none|l:0|e:0|k:inf|a:none|t:none|v:1.0.0";
    let out = Command::new(env!("CARGO_BIN_EXE_cred"))
        .args(["score", "--input", "-"])
        .env("CRED_DEFAULT_SIGNATURE", sig)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .and_then(|mut c| {
            c.stdin.take().unwrap().write_all(b"{\"text\":\"abcabcabc\"}\n")?;
            c.wait_with_output()
        })
        .unwrap();
    let line: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(line["cred"]["signature"], sig);
}

#[test]
fn filter_drops_repeated_line_corpus() {
    let vocab = Vocabulary::new(5000, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let docs: Vec<Value> = (0..200).map(|i| json!({"id": i, "text": repeated_line(&vocab, &mut rng, 200 + 20 * i)})).collect();
    let dir = tempfile::tempdir().unwrap();
    let stats_path = dir.path().join("stats.json");
    let out = cred(&["filter", "--stats", stats_path.to_str().unwrap()], &jsonl(&docs));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stats: Value = serde_json::from_str(&std::fs::read_to_string(&stats_path).unwrap()).unwrap();
    let (kept, dropped) = (stats["kept"].as_u64().unwrap(), stats["dropped"].as_u64().unwrap());
    assert_eq!(kept + dropped, 200);
    assert_eq!(stdout(&out).lines().count() as u64, kept);
    assert!(dropped as f64 >= 0.95 * 200.0, "{stats}");
}

#[test]
fn filter_keeps_everything_below_threshold_verbatim() {
    let docs = prose_docs(10, 4);
    let input = jsonl(&docs.iter().map(|t| json!({"text": t, "extra": [1, 2]})).collect::<Vec<_>>());
    let out = cred(&["filter", "--threshold", "1e9", "--stats", "/dev/null"], &input);
    assert!(out.status.success());
    assert_eq!(stdout(&out), input);
}

#[test]
fn aggregate_orders_noisy_above_clean() {
    let vocab = Vocabulary::new(5000, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut records = Vec::new();
    for i in 0..60 {
        records.push(json!({"group": "clean", "text": vocab.prose(&mut rng, 500 + 40 * i)}));
        let kind = NoisyKind::ALL[i % 3];
        records.push(json!({"group": "noisy", "text": noisy_document(kind, &vocab, &mut rng, 500 + 40 * i)}));
    }
    records.push(json!({"text": "no group field on this record at all"}));
    let out = cred(&["aggregate"], &jsonl(&records));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows[0][..2], ["group", "count"]);
    assert_eq!(rows.len(), 4);
    let find = |g: &str| rows.iter().find(|r| r[0] == g).unwrap().clone();
    let (clean, noisy, unknown) = (find("clean"), find("noisy"), find("unknown"));
    assert_eq!(unknown[1], "1");
    let total: usize = rows[1..].iter().map(|r| r[1].parse::<usize>().unwrap()).sum();
    assert_eq!(total, records.len());
    for col in 2..5 {
        let c: f64 = clean[col].parse().unwrap();
        let n: f64 = noisy[col].parse().unwrap();
        assert!(n > c, "{}: noisy {n} <= clean {c}", rows[0][col]);
    }
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

#[test]
fn eval_reports_perfect_synthetic_task() {
    let out = cred(&["eval", "--synthetic", "40", "--tune-threshold", "--seed", "9"], "");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["f1"], 1.0);
    assert_eq!(report["n_docs"], 16);
    let sig = report["signature"].as_str().unwrap();
    let cfg = cred_core::parse_signature(sig).unwrap();
    assert!(cfg.threshold.is_some());
    assert_eq!(cfg.clone().with_threshold(None), cred_core::default_config("moment-c6").unwrap().with_threshold(None));
}

#[test]
fn eval_reads_tsv_and_uses_signature_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bread.tsv");
    let vocab = Vocabulary::new(5000, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut tsv = String::from("id\ttext\tlabel\tsplit\n");
    for i in 0..30 {
        let split = if i % 2 == 0 { "tune" } else { "test" };
        let clean = vocab.prose(&mut rng, 800).replace(['\n', '\t'], " ");
        let rep = repeated_line(&vocab, &mut rng, 800).replace('\n', " ");
        tsv.push_str(&format!("c{i}\t{clean}\tOK\t{split}\nr{i}\t{rep}\tREP\t{split}\nu{i}\tx\tunk\t{split}\n"));
    }
    write(&path, &tsv);
    let out = cred(&["eval", "--bread", path.to_str().unwrap(), "--signature", "moment-c6", "--bootstrap", "200"], "");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["signature"], cred_core::default_config("moment-c6").unwrap().signature());
    assert_eq!(report["n_docs"], 30);
    let c = &report["confusion"];
    let total: u64 = ["tp", "fp", "tn", "fn"].iter().map(|k| c[k].as_u64().unwrap()).sum();
    assert_eq!(total, 30);
    let ci = report["ci95"].as_array().unwrap();
    assert!(ci[0].as_f64().unwrap() <= report["f1"].as_f64().unwrap());

    let no_threshold = cred(&["eval", "--bread", path.to_str().unwrap(), "--threshold", "none"], "");
    assert_eq!(no_threshold.status.code(), Some(1));
}

#[test]
fn tune_writes_ranked_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let out = cred(
        &["tune", "--synthetic", "25", "--preset", "ttr", "--ngram-sets", "c4;c6", "--top-k", "2", "--summary", summary.to_str().unwrap()],
        "",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rank\tsignature\ttune_objective\ttest_objective"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 2);
    let tune: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(tune[0] >= tune[1]);
    for r in &rows {
        assert!(cred_core::parse_signature(r[1]).unwrap().threshold.is_some());
    }
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["top_k"], 2);
    assert_eq!(cred(&["tune", "--synthetic", "5", "--preset", "bleu"], "").status.code(), Some(1));
}

#[test]
fn fit_zipf_on_reference_curve() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("counts.tsv");
    let params = dir.path().join("params.json");
    let mut tsv = String::from("n\trank\tfrequency\n");
    for n in [3usize, 5] {
        for (r, f) in cred_core::zipf_reference(n, 200).unwrap().iter().enumerate() {
            tsv.push_str(&format!("{n}\t{}\t{f}\n", r + 1));
        }
    }
    write(&table, &tsv);
    let args = ["fit-zipf", "--empirical", table.to_str().unwrap(), "--seed", "1", "--max-steps", "300", "--out", params.to_str().unwrap()];
    let out = cred(&args, "");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let p: Value = serde_json::from_str(&std::fs::read_to_string(&params).unwrap()).unwrap();
    assert!(p["loss"].as_f64().unwrap() <= p["initial_loss"].as_f64().unwrap());
    assert!((p["b_scale"].as_f64().unwrap() - 6.809).abs() < 1e-9);

    write(&table, "n\trank\tfrequency\n2\t2\t0.1\n");
    assert_eq!(cred(&args, "").status.code(), Some(2));
}

#[test]
fn zipf_and_defaults_listings() {
    let out = cred(&["zipf", "--n", "6", "--ranks", "5"], "");
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    let f: Vec<f64> = lines[1..].iter().map(|l| l.split('\t').nth(1).unwrap().parse().unwrap()).collect();
    assert!(f.windows(2).all(|w| w[0] > w[1]));

    let out = cred(&["defaults"], "");
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 5);
    for line in text.lines() {
        let (_, sig) = line.split_once('\t').unwrap();
        assert!(cred_core::parse_signature(sig).unwrap().threshold.is_some());
    }
}
