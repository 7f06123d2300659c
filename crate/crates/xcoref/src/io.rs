//! JSON-lines corpus files: one document per line with `doc_key`,
//! `sentences` and `clusters` (inclusive `[start, end]` token pairs).
//! Parallel files add `target_sentences` and, for analysis, an optional
//! `target_clusters`.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use xcoref_core::corpus::{Document, ParallelDocument, Span, Vocabulary};

use crate::error::{io_err, HarnessError, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    doc_key: String,
    sentences: Vec<Vec<String>>,
    clusters: Vec<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target_sentences: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target_clusters: Option<Vec<Vec<[usize; 2]>>>,
}

fn to_spans(clusters: Vec<Vec<[usize; 2]>>) -> Vec<Vec<Span>> {
    clusters.into_iter().map(|c| c.into_iter().map(|[s, e]| Span::new(s, e)).collect()).collect()
}

fn to_pairs(clusters: &[Vec<Span>]) -> Vec<Vec<[usize; 2]>> {
    clusters.iter().map(|c| c.iter().map(|s| [s.start, s.end]).collect()).collect()
}

fn parse_record(line: &str) -> std::result::Result<(Document, Option<Vec<Vec<String>>>, Option<Vec<Vec<Span>>>), String> {
    let r: Record = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let doc = Document::new(r.doc_key, r.sentences, to_spans(r.clusters)).map_err(|e| e.to_string())?;
    Ok((doc, r.target_sentences, r.target_clusters.map(to_spans)))
}

/// Parses one corpus line; `line_no` is 1-based and only used in errors.
pub fn parse_document(line: &str, line_no: usize) -> std::result::Result<Document, String> {
    parse_record(line).map(|(d, _, _)| d).map_err(|e| format!("line {line_no}: {e}"))
}

pub fn parse_parallel(line: &str, line_no: usize) -> std::result::Result<ParallelDocument, String> {
    let (doc, target, target_clusters) = parse_record(line).map_err(|e| format!("line {line_no}: {e}"))?;
    let target = target.ok_or_else(|| format!("line {line_no}: missing target_sentences"))?;
    ParallelDocument::new(doc, target, target_clusters).map_err(|e| format!("line {line_no}: {e}"))
}

pub fn serialize_document(doc: &Document) -> String {
    let r = Record {
        doc_key: doc.doc_key.clone(),
        sentences: doc.sentences.clone(),
        clusters: to_pairs(&doc.clusters),
        target_sentences: None,
        target_clusters: None,
    };
    serde_json::to_string(&r).expect("plain data serializes")
}

pub fn serialize_parallel(pdoc: &ParallelDocument) -> String {
    let r = Record {
        doc_key: pdoc.source.doc_key.clone(),
        sentences: pdoc.source.sentences.clone(),
        clusters: to_pairs(&pdoc.source.clusters),
        target_sentences: Some(pdoc.target_sentences.clone()),
        target_clusters: pdoc.target_clusters.as_deref().map(to_pairs),
    };
    serde_json::to_string(&r).expect("plain data serializes")
}

fn read_lines<T>(path: &Path, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = parse(&line).map_err(|message| HarnessError::Parse { path: path.into(), line: i + 1, message })?;
        out.push(item);
    }
    Ok(out)
}

/// Documents in file order. Blank lines are skipped; the first bad line
/// aborts with its line number.
pub fn load_corpus(path: &Path) -> Result<Vec<Document>> {
    read_lines(path, |l| parse_record(l).map(|(d, _, _)| d))
}

pub fn load_parallel(path: &Path) -> Result<Vec<ParallelDocument>> {
    read_lines(path, |l| {
        let (doc, target, clusters) = parse_record(l)?;
        let target = target.ok_or("missing target_sentences")?;
        ParallelDocument::new(doc, target, clusters).map_err(|e| e.to_string())
    })
}

fn write_lines(path: &Path, lines: impl Iterator<Item = String>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_corpus(path: &Path, docs: &[Document]) -> Result<()> {
    write_lines(path, docs.iter().map(serialize_document))
}

pub fn write_parallel(path: &Path, docs: &[ParallelDocument]) -> Result<()> {
    write_lines(path, docs.iter().map(serialize_parallel))
}

/// Vocabulary as a JSON array of tokens in id order.
pub fn save_vocab(path: &Path, vocab: &Vocabulary) -> Result<()> {
    let text = serde_json::to_string(vocab.tokens()).expect("strings serialize");
    fs::write(path, text).map_err(io_err(path))
}

pub fn load_vocab(path: &Path) -> Result<Vocabulary> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let tokens: Vec<String> =
        serde_json::from_str(&text).map_err(|e| HarnessError::Parse { path: path.into(), line: 1, message: e.to_string() })?;
    Ok(Vocabulary::from_id_order(tokens)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_documents() {
        let d = parse_document(r#"{"doc_key":"d0","sentences":[["a","b"]],"clusters":[]}"#, 1).unwrap();
        assert_eq!((d.token_count(), d.clusters.len()), (2, 0));
        let d = parse_document(r#"{"doc_key":"d2","sentences":[["a","b","c"]],"clusters":[[[0,0],[2,2]]]}"#, 1).unwrap();
        assert_eq!(d.clusters, vec![vec![Span::new(0, 0), Span::new(2, 2)]]);
    }

    #[test]
    fn singleton_cluster_is_rejected_with_doc_key() {
        let err = parse_document(r#"{"doc_key":"d1","sentences":[["x"]],"clusters":[[[0,0]]]}"#, 4).unwrap_err();
        assert!(err.contains("line 4") && err.contains("d1"), "{err}");
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(parse_document("{not json", 1).is_err());
    }

    #[test]
    fn round_trip() {
        let line = r#"{"doc_key":"k","sentences":[["he","saw","him"]],"clusters":[[[0,0],[2,2]]]}"#;
        let d = parse_document(line, 1).unwrap();
        assert_eq!(serialize_document(&d), line);
        assert_eq!(parse_document(&serialize_document(&d), 1).unwrap(), d);
    }

    #[test]
    fn parallel_needs_target() {
        assert!(parse_parallel(r#"{"doc_key":"d0","sentences":[["a"]],"clusters":[]}"#, 1).is_err());
        let p = parse_parallel(r#"{"doc_key":"d0","sentences":[["a"]],"clusters":[],"target_sentences":[["b"]]}"#, 1).unwrap();
        assert_eq!(p.target_sentences, vec![vec!["b".to_string()]]);
        assert_eq!(parse_parallel(&serialize_parallel(&p), 1).unwrap(), p);
    }
}
