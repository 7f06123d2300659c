use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xcoref_core::autodiff::{grad_check, Graph, ParamStore};
use xcoref_core::coref::CorefForward;
use xcoref_core::corpus::{generate_toy_corpus, pseudo_translate, Document, Span, TranslationMode, Vocabulary};
use xcoref_core::model::{init_adapters, init_params, ModelConfig};
use xcoref_core::xlingual::{joint_loss, XlForward};

fn tiny_config() -> ModelConfig {
    ModelConfig {
        embed_dim: 2,
        hidden_dim: 2,
        width_feature_dim: 2,
        ffn_hidden: 3,
        adapter_hidden: 3,
        max_span_width: 3,
        ..ModelConfig::default()
    }
}

/// First `n` sentences of a toy document, keeping clusters that survive.
fn truncate(doc: &Document, n: usize) -> Document {
    let sentences: Vec<Vec<String>> = doc.sentences.iter().take(n).cloned().collect();
    let limit: usize = sentences.iter().map(Vec::len).sum();
    let clusters: Vec<Vec<Span>> = doc
        .clusters
        .iter()
        .map(|c| c.iter().copied().filter(|s| s.end < limit).collect::<Vec<_>>())
        .filter(|c| c.len() >= 2)
        .collect();
    Document::new(doc.doc_key.clone(), sentences, clusters).unwrap()
}

fn instance(seed: u64) -> (ModelConfig, Document, ParamStore, Vocabulary) {
    let cfg = tiny_config();
    let doc = truncate(&generate_toy_corpus(1, seed)[0], 3);
    let vocab = Vocabulary::build(std::slice::from_ref(&doc)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = init_params(&cfg, vocab.len(), &mut rng).unwrap();
    init_adapters(&mut store, &cfg, &mut rng).unwrap();
    // Nonzero output projections so the adapter weights see real gradients.
    for name in ["adapter_m.w2", "adapter_c.w2", "adapter_m.b2", "adapter_c.b2"] {
        for (k, v) in store.value_mut(name).unwrap().iter_mut().enumerate() {
            *v = 0.1 * ((k as f64 + seed as f64) * 0.7).sin();
        }
    }
    (cfg, doc, store, vocab)
}

#[test]
fn monolingual_loss_gradients_match_finite_differences() {
    for seed in 0..2 {
        let (cfg, doc, mut store, vocab) = instance(seed);
        let ids = vocab.encode(&doc.sentences);
        let report = grad_check(&mut store, 1e-7, |g: &mut Graph<'_>| {
            let fwd = CorefForward::build(g, &cfg, &ids)?;
            fwd.loss(g, &doc.clusters)
        })
        .unwrap();
        assert!(report.max_rel_error <= 1e-4, "seed {seed}: {report:?}");
    }
}

#[test]
fn joint_loss_gradients_match_finite_differences() {
    for seed in 0..2 {
        let (cfg, doc, mut store, vocab) = instance(seed);
        let pdoc = pseudo_translate(&doc, TranslationMode::Identity, seed);
        let ids = vocab.encode(&doc.sentences);
        let tids = vocab.encode(&pdoc.target_sentences);
        let report = grad_check(&mut store, 1e-7, |g: &mut Graph<'_>| {
            let fwd = XlForward::build(g, &cfg, &ids, &tids)?;
            let lc = fwd.coref.loss(g, &doc.clusters)?;
            joint_loss(g, lc, fwd.xl_loss, 1.0)
        })
        .unwrap();
        assert!(report.max_rel_error <= 1e-4, "seed {seed}: {report:?}");
    }
}
