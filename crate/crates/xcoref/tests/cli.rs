use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use xcoref::io::{load_corpus, load_parallel};

fn xcoref(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xcoref")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: [&str; 6] = ["epochs=2", "embed_dim=8", "hidden_dim=8", "width_feature_dim=4", "ffn_hidden=16", "adapter_hidden=8"];

fn small_run(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let corpus = dir.join("toy.jsonl");
    assert!(xcoref(&["gen-corpus", "--n", "4", "--seed", "3", "--out", p(&corpus)]).status.success());
    let out = dir.join("run");
    let mut args = vec![
        "train".to_string(),
        format!("train_path={}", p(&corpus)),
        format!("dev_path={}", p(&corpus)),
        format!("output_dir={}", p(&out)),
    ];
    args.extend(SMALL.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = xcoref(&refs);
    assert!(o.status.success(), "{}", stderr(&o));
    (corpus, out)
}

#[test]
fn no_arguments_prints_usage() {
    let o = xcoref(&[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn gen_corpus_writes_loadable_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("toy.jsonl");
    let o = xcoref(&["gen-corpus", "--n", "20", "--seed", "0", "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let docs = load_corpus(&out).unwrap();
    assert_eq!(docs.len(), 20);
    assert!(docs.iter().all(|d| !d.clusters.is_empty()));
}

#[test]
fn missing_train_file_is_reported() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.jsonl");
    let o = xcoref(&["train", &format!("train_path={}", p(&missing)), &format!("output_dir={}", p(&dir.path().join("r")))]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("absent.jsonl"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_rejected() {
    let o = xcoref(&["train", "epochz=3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("epochz"), "{}", stderr(&o));
}

#[test]
fn train_then_evaluate_is_repeatable() {
    let dir = TempDir::new().unwrap();
    let (corpus, out) = small_run(dir.path());
    for f in ["config.toml", "vocab.json", "log.jsonl", "best.ckpt", "metrics.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let log = std::fs::read_to_string(out.join("log.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 3);

    let ckpt = out.join("best.ckpt");
    let eval = || xcoref(&["evaluate", "--checkpoint", p(&ckpt), "--corpus", p(&corpus)]);
    let a = eval();
    let b = eval();
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let table = String::from_utf8(a.stdout).unwrap();
    assert!(table.contains("CEAF_e") && table.contains("Avg."));
    assert!(out.join("best.metrics.json").exists());

    let predicted = dir.path().join("pred.jsonl");
    let o = xcoref(&["predict", "--checkpoint", p(&ckpt), "--corpus", p(&corpus), "--out", p(&predicted)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let docs = load_corpus(&predicted).unwrap();
    assert_eq!(docs.len(), 4);
}

#[test]
fn vocabulary_mismatch_is_an_error() {
    let dir = TempDir::new().unwrap();
    let (corpus, out) = small_run(dir.path());
    std::fs::write(out.join("vocab.json"), "[\"<unk>\", \"a\"]").unwrap();
    let o = xcoref(&["evaluate", "--checkpoint", p(&out.join("best.ckpt")), "--corpus", p(&corpus)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("vocabulary"), "{}", stderr(&o));
}

#[test]
fn translate_and_analyze_pairs() {
    let dir = TempDir::new().unwrap();
    let (corpus, out) = small_run(dir.path());

    let xeno = dir.path().join("xeno.jsonl");
    let o = xcoref(&["translate", "--input", p(&corpus), "--out", p(&xeno), "--seed", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(load_parallel(&xeno).unwrap().len(), 4);

    let ident = dir.path().join("ident.jsonl");
    let o = xcoref(&["translate", "--input", p(&corpus), "--out", p(&ident), "--mode", "identity", "--analysis"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let mono = xcoref(&["analyze-pairs", "--checkpoint", p(&out.join("best.ckpt")), "--corpus", p(&ident)]);
    assert_eq!(mono.status.code(), Some(1));

    let xl = dir.path().join("xl");
    let mut args = vec![
        "train-xl".to_string(),
        format!("parallel_train_path={}", p(&ident)),
        format!("dev_path={}", p(&corpus)),
        format!("output_dir={}", p(&xl)),
    ];
    args.extend(SMALL.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = xcoref(&refs);
    assert!(o.status.success(), "{}", stderr(&o));

    let tsv = dir.path().join("pairs.tsv");
    let o = xcoref(&["analyze-pairs", "--checkpoint", p(&xl.join("best.ckpt")), "--corpus", p(&ident), "--tsv", p(&tsv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let counts: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let total = counts["total"].as_u64().unwrap();
    let parts: u64 = ["identical", "coreferential", "same_surface", "other"].iter().map(|k| counts[*k].as_u64().unwrap()).sum();
    assert_eq!(parts, total);
    let rows = std::fs::read_to_string(&tsv).unwrap();
    assert_eq!(rows.lines().count() as u64, total + 1);
}
