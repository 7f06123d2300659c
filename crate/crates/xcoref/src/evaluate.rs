use std::collections::BTreeSet;

use serde_json::json;
use xcoref_core::autodiff::{Graph, ParamStore};
use xcoref_core::coref::{ClusterSet, CorefForward};
use xcoref_core::corpus::{Document, Span, Vocabulary};
use xcoref_core::metrics::{CorpusScorer, Prf, Scores};
use xcoref_core::model::ModelConfig;

use crate::error::{HarnessError, Result};

/// Decoded output for one document.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub doc_key: String,
    pub clusters: ClusterSet,
    /// Pruned spans with a positive mention score.
    pub mentions: BTreeSet<Span>,
}

/// Fails unless the embedding table has one row per vocabulary entry.
pub fn check_vocab(store: &ParamStore, vocab: &Vocabulary, prefix: &str) -> Result<()> {
    let name = format!("{prefix}embed");
    let rows = store
        .get(&name)
        .ok_or_else(|| HarnessError::Config(format!("checkpoint has no `{name}` table")))?
        .rows();
    if rows != vocab.len() {
        return Err(HarnessError::Config(format!(
            "vocabulary has {} entries but checkpoint `{name}` has {rows} rows",
            vocab.len()
        )));
    }
    Ok(())
}

/// Source-side inference: encoder, mention scorer and antecedent scorer.
pub fn predict_document(model: &ModelConfig, store: &ParamStore, vocab: &Vocabulary, doc: &Document) -> Result<Prediction> {
    let ids = vocab.encode(&doc.sentences);
    let mut g = Graph::new(store);
    let fwd = CorefForward::build(&mut g, model, &ids)?;
    let clusters = fwd.predict(&g)?;
    let mentions = fwd.side.pruned.iter().filter(|s| s.score > 0.0).map(|s| s.span).collect();
    Ok(Prediction { doc_key: doc.doc_key.clone(), clusters, mentions })
}

pub fn predict_documents(
    model: &ModelConfig,
    store: &ParamStore,
    vocab: &Vocabulary,
    docs: &[Document],
) -> Result<Vec<Prediction>> {
    check_vocab(store, vocab, "src.")?;
    docs.iter().map(|d| predict_document(model, store, vocab, d)).collect()
}

/// Corpus-level scores of `predictions` against the gold annotations.
pub fn score(docs: &[Document], predictions: &[Prediction]) -> Scores {
    let mut scorer = CorpusScorer::new();
    for (doc, pred) in docs.iter().zip(predictions) {
        scorer.add_document(&doc.clusters, &pred.clusters, &doc.mentions(), &pred.mentions);
    }
    scorer.scores()
}

pub fn evaluate_documents(model: &ModelConfig, store: &ParamStore, vocab: &Vocabulary, docs: &[Document]) -> Result<Scores> {
    Ok(score(docs, &predict_documents(model, store, vocab, docs)?))
}

/// Header and one row: mention F1, then R/P/F1 for MUC, B³ and CEAF_e,
/// then the average F1, all in percent.
pub fn format_table(scores: &Scores) -> String {
    let pct = |v: f64| format!("{:6.2}", 100.0 * v);
    let prf = |p: &Prf| format!("{} {} {}", pct(p.recall), pct(p.precision), pct(p.f1));
    let header = format!(
        "{:>6} | {:^20} | {:^20} | {:^20} | {:>6}\n{:>6} | {:^20} | {:^20} | {:^20} | {:>6}",
        "Ment.", "MUC", "B3", "CEAF_e", "Avg.", "F1", "R      P      F1", "R      P      F1", "R      P      F1", "F1"
    );
    format!(
        "{header}\n{} | {} | {} | {} | {}",
        pct(scores.mention.f1),
        prf(&scores.muc),
        prf(&scores.b_cubed),
        prf(&scores.ceaf_e),
        pct(scores.avg_f1)
    )
}

pub fn scores_json(scores: &Scores) -> serde_json::Value {
    let prf = |p: &Prf| json!({"recall": p.recall, "precision": p.precision, "f1": p.f1});
    json!({
        "mention": prf(&scores.mention),
        "muc": prf(&scores.muc),
        "b_cubed": prf(&scores.b_cubed),
        "ceaf_e": prf(&scores.ceaf_e),
        "avg_f1": scores.avg_f1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use xcoref_core::corpus::generate_toy_corpus;

    #[test]
    fn gold_as_prediction_scores_one() {
        let docs = generate_toy_corpus(4, 2);
        let preds: Vec<Prediction> = docs
            .iter()
            .map(|d| Prediction { doc_key: d.doc_key.clone(), clusters: d.clusters.clone(), mentions: d.mentions() })
            .collect();
        let s = score(&docs, &preds);
        for v in [s.mention.f1, s.muc.f1, s.b_cubed.f1, s.ceaf_e.f1, s.avg_f1] {
            assert_eq!(v, 1.0);
        }
        let table = format_table(&s);
        assert!(table.lines().nth(2).unwrap().contains("100.00"));
    }
}
