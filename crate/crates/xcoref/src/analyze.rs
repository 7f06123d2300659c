use xcoref_core::autodiff::ParamStore;
use xcoref_core::corpus::{ParallelDocument, Span, Vocabulary};
use xcoref_core::model::ModelConfig;
use xcoref_core::xlingual::{classify_pairs, PairAnalysis, PairCategory};

use crate::error::{HarnessError, Result};
use crate::train::predict_pairs;

/// One predicted cross-lingual pair with its category.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifiedPair {
    pub doc_key: String,
    pub source: Span,
    pub target: Span,
    pub category: PairCategory,
}

/// Predicts pairs on every identity-translated document and sorts them
/// into categories.
pub fn analyze_corpus(
    model: &ModelConfig,
    store: &ParamStore,
    vocab: &Vocabulary,
    target_vocab: Option<&Vocabulary>,
    docs: &[ParallelDocument],
) -> Result<(PairAnalysis, Vec<ClassifiedPair>)> {
    if !store.contains("adapter_c.w1") {
        return Err(HarnessError::Config("checkpoint has no adapters; analyze-pairs needs a train-xl checkpoint".into()));
    }
    let mut total = PairAnalysis::default();
    let mut rows = Vec::new();
    for pdoc in docs {
        let pairs = predict_pairs(model, store, vocab, target_vocab, pdoc)?;
        for (&(source, target), category) in pairs.iter().zip(classify_pairs(&pairs, pdoc)?) {
            total.add(category);
            rows.push(ClassifiedPair { doc_key: pdoc.source.doc_key.clone(), source, target, category });
        }
    }
    Ok((total, rows))
}

pub fn category_name(c: PairCategory) -> &'static str {
    match c {
        PairCategory::Identical => "identical",
        PairCategory::Coreferential => "coreferential",
        PairCategory::SameSurface => "same_surface",
        PairCategory::Other => "other",
    }
}

/// Tab-separated rows: doc_key, source start/end, target start/end,
/// category.
pub fn pairs_tsv(rows: &[ClassifiedPair]) -> String {
    let mut out = String::from("doc_key\tsrc_start\tsrc_end\ttgt_start\ttgt_end\tcategory\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.doc_key,
            r.source.start,
            r.source.end,
            r.target.start,
            r.target.end,
            category_name(r.category)
        ));
    }
    out
}

pub fn analysis_json(a: &PairAnalysis) -> serde_json::Value {
    serde_json::json!({
        "total": a.total,
        "identical": a.identical,
        "coreferential": a.coreferential,
        "same_surface": a.same_surface,
        "other": a.other,
    })
}
