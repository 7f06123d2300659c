//! Monolingual and joint training loops.
//!
//! Each epoch visits the training documents in an order shuffled under the
//! run seed and takes one optimizer step per document. Epoch 0 records the
//! losses and dev score of the initial parameters without updating them.
//! The checkpoint with the best dev average F1 is kept; ties go to the
//! earlier epoch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use xcoref_core::autodiff::{adam_step, AdamConfig, Graph, ParamStore};
use xcoref_core::coref::CorefForward;
use xcoref_core::corpus::{Document, ParallelDocument, Span, Vocabulary};
use xcoref_core::model::{init_adapters, init_params, init_target_encoder, EncoderMode, ModelConfig};
use xcoref_core::xlingual::{joint_loss, XlForward};

use crate::checkpoint::{load_checkpoint, save_checkpoint};
use crate::config::RunConfig;
use crate::error::{io_err, HarnessError, Result};
use crate::evaluate::{evaluate_documents, scores_json};
use crate::io::{load_corpus, load_parallel, load_vocab, save_vocab};

const PARAM_STREAM: u64 = 0;
const SHUFFLE_STREAM: u64 = 1;
const ADAPTER_STREAM: u64 = 2;
const TARGET_STREAM: u64 = 3;

/// Parameter prefixes carried over from a monolingual checkpoint.
pub const SOURCE_PREFIXES: [&str; 3] = ["src.", "mention.", "coref."];

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// One line of `log.jsonl`. Losses are means over training documents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub coref_loss: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xl_loss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_loss: Option<f64>,
    pub dev_avg_f1: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: ModelConfig,
    pub vocab: Vocabulary,
    pub target_vocab: Option<Vocabulary>,
    pub log: Vec<EpochLog>,
    pub best_epoch: usize,
    pub best: ParamStore,
    pub last: ParamStore,
}

/// Starting point for training.
pub enum Init<'a> {
    /// Random parameters over the given vocabulary.
    Fresh(Vocabulary),
    /// Source-side parameters, optimizer state and vocabulary from an
    /// earlier run.
    Checkpoint { store: &'a ParamStore, vocab: &'a Vocabulary },
}

struct Losses {
    coref: f64,
    xl: Option<f64>,
    joint: Option<f64>,
}

/// Shared epoch loop. `step` computes the losses of document `i` and, when
/// asked to, applies one update.
#[allow(clippy::too_many_arguments)]
fn run_epochs(
    run: &RunConfig,
    model: &ModelConfig,
    vocab: &Vocabulary,
    store: &mut ParamStore,
    n_docs: usize,
    dev: &[Document],
    mut step: impl FnMut(&mut ParamStore, usize, bool) -> Result<Losses>,
    mut on_epoch: impl FnMut(&EpochLog) -> bool,
) -> Result<(Vec<EpochLog>, usize, ParamStore)> {
    let mut shuffle = rng(run.seed, SHUFFLE_STREAM);
    let mut order: Vec<usize> = (0..n_docs).collect();
    let mut log = Vec::new();
    let mut best: Option<(f64, usize, ParamStore)> = None;
    for epoch in 0..=run.epochs {
        let update = epoch > 0;
        if update {
            order.shuffle(&mut shuffle);
        }
        let (mut coref, mut xl, mut joint) = (0.0, None::<f64>, None::<f64>);
        for &i in &order {
            let l = step(store, i, update)?;
            coref += l.coref;
            if let Some(v) = l.xl {
                *xl.get_or_insert(0.0) += v;
            }
            if let Some(v) = l.joint {
                *joint.get_or_insert(0.0) += v;
            }
        }
        let n = n_docs.max(1) as f64;
        let dev_avg_f1 = evaluate_documents(model, store, vocab, dev)?.avg_f1;
        let entry = EpochLog {
            epoch,
            coref_loss: coref / n,
            xl_loss: xl.map(|v| v / n),
            joint_loss: joint.map(|v| v / n),
            dev_avg_f1,
        };
        if best.as_ref().is_none_or(|(f, _, _)| dev_avg_f1 > *f) {
            best = Some((dev_avg_f1, epoch, store.clone()));
        }
        let keep_going = on_epoch(&entry);
        log.push(entry);
        if !keep_going {
            break;
        }
    }
    let (_, best_epoch, best) = best.expect("epoch 0 always runs");
    Ok((log, best_epoch, best))
}

fn update(store: &mut ParamStore, grads: &xcoref_core::autodiff::Gradients, adam: &AdamConfig) -> Result<()> {
    Ok(adam_step(store, grads, adam)?)
}

fn source_store(model: &ModelConfig, seed: u64, init: Init<'_>) -> Result<(ParamStore, Vocabulary)> {
    match init {
        Init::Fresh(vocab) => Ok((init_params(model, vocab.len(), &mut rng(seed, PARAM_STREAM))?, vocab)),
        Init::Checkpoint { store: ckpt, vocab } => {
            let mut store = init_params(model, vocab.len(), &mut rng(seed, PARAM_STREAM))?;
            store.load_from(ckpt, &SOURCE_PREFIXES)?;
            Ok((store, vocab.clone()))
        }
    }
}

/// Monolingual training on annotated documents.
pub fn train_documents(
    run: &RunConfig,
    train: &[Document],
    dev: &[Document],
    init: Init<'_>,
    on_epoch: impl FnMut(&EpochLog) -> bool,
) -> Result<TrainOutcome> {
    let model = run.model()?;
    let adam = run.adam();
    let (mut store, vocab) = source_store(&model, run.seed, init)?;
    let ids: Vec<Vec<Vec<usize>>> = train.iter().map(|d| vocab.encode(&d.sentences)).collect();

    let step = |store: &mut ParamStore, i: usize, apply: bool| -> Result<Losses> {
        let g_store: &ParamStore = store;
        let mut g = Graph::new(g_store);
        let fwd = CorefForward::build(&mut g, &model, &ids[i])?;
        let loss = fwd.loss(&mut g, &train[i].clusters)?;
        let value = g.value(loss).item();
        if apply {
            let grads = g.backward(loss)?;
            drop(g);
            update(store, &grads, &adam)?;
        }
        Ok(Losses { coref: value, xl: None, joint: None })
    };
    let (log, best_epoch, best) = run_epochs(run, &model, &vocab, &mut store, train.len(), dev, step, on_epoch)?;
    Ok(TrainOutcome { model, vocab, target_vocab: None, log, best_epoch, best, last: store })
}

/// Joint training on parallel documents: the coreference loss on the
/// annotated source side plus `loss_ratio` times the cross-lingual loss.
///
/// With `Init::Fresh` the vocabulary must already cover whatever target
/// tokens the shared encoder should know. In separate mode the target
/// encoder gets its own vocabulary built from the target sides.
pub fn train_parallel(
    run: &RunConfig,
    parallel: &[ParallelDocument],
    dev: &[Document],
    init: Init<'_>,
    on_epoch: impl FnMut(&EpochLog) -> bool,
) -> Result<TrainOutcome> {
    let model = run.model()?;
    let adam = run.adam();
    let (mut store, vocab) = source_store(&model, run.seed, init)?;
    init_adapters(&mut store, &model, &mut rng(run.seed, ADAPTER_STREAM))?;
    let target_vocab = match model.encoder_mode {
        EncoderMode::Shared => None,
        EncoderMode::Separate => {
            let tv = Vocabulary::from_tokens(parallel.iter().flat_map(|p| p.target_tokens()));
            init_target_encoder(&mut store, &model, tv.len(), &mut rng(run.seed, TARGET_STREAM))?;
            Some(tv)
        }
    };
    let tvocab = target_vocab.as_ref().unwrap_or(&vocab);
    let ids: Vec<(Vec<Vec<usize>>, Vec<Vec<usize>>)> = parallel
        .iter()
        .map(|p| (vocab.encode(&p.source.sentences), tvocab.encode(&p.target_sentences)))
        .collect();

    let ratio = run.loss_ratio;
    let step = |store: &mut ParamStore, i: usize, apply: bool| -> Result<Losses> {
        let g_store: &ParamStore = store;
        let mut g = Graph::new(g_store);
        let fwd = XlForward::build(&mut g, &model, &ids[i].0, &ids[i].1)?;
        let lc = fwd.coref.loss(&mut g, &parallel[i].source.clusters)?;
        let total = joint_loss(&mut g, lc, fwd.xl_loss, ratio)?;
        let values = Losses {
            coref: g.value(lc).item(),
            xl: Some(g.value(fwd.xl_loss).item()),
            joint: Some(g.value(total).item()),
        };
        if apply {
            let grads = g.backward(total)?;
            drop(g);
            update(store, &grads, &adam)?;
        }
        Ok(values)
    };
    let (log, best_epoch, best) = run_epochs(run, &model, &vocab, &mut store, parallel.len(), dev, step, on_epoch)?;
    Ok(TrainOutcome { model, vocab, target_vocab, log, best_epoch, best, last: store })
}

/// Pairs of (source, target) mention spans predicted on one parallel
/// document.
pub fn predict_pairs(
    model: &ModelConfig,
    store: &ParamStore,
    vocab: &Vocabulary,
    target_vocab: Option<&Vocabulary>,
    pdoc: &ParallelDocument,
) -> Result<Vec<(Span, Span)>> {
    let ids = vocab.encode(&pdoc.source.sentences);
    let tids = target_vocab.unwrap_or(vocab).encode(&pdoc.target_sentences);
    let mut g = Graph::new(store);
    Ok(XlForward::build(&mut g, model, &ids, &tids)?.predicted_pairs())
}

fn required<'a>(path: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    path.as_deref().ok_or_else(|| HarnessError::Config(format!("`{key}` is required")))
}

/// Checkpoint plus the vocabulary file stored next to it.
pub fn load_run_checkpoint(path: &Path) -> Result<(ParamStore, Vocabulary, Option<Vocabulary>)> {
    let store = load_checkpoint(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let vocab = load_vocab(&dir.join("vocab.json"))?;
    let target = dir.join("target_vocab.json");
    let target_vocab = if target.exists() { Some(load_vocab(&target)?) } else { None };
    Ok((store, vocab, target_vocab))
}

/// Writes the resolved config, vocabularies, log, best checkpoint and the
/// dev scores of that checkpoint into `output_dir`.
fn write_outputs(run: &RunConfig, outcome: &TrainOutcome, dev: &[Document]) -> Result<()> {
    let dir = &run.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let p = dir.join("config.toml");
    fs::write(&p, run.to_toml()).map_err(io_err(&p))?;
    save_vocab(&dir.join("vocab.json"), &outcome.vocab)?;
    if let Some(tv) = &outcome.target_vocab {
        save_vocab(&dir.join("target_vocab.json"), tv)?;
    }
    save_checkpoint(&dir.join("best.ckpt"), &outcome.best)?;
    let scores = evaluate_documents(&outcome.model, &outcome.best, &outcome.vocab, dev)?;
    let mut sidecar = scores_json(&scores);
    sidecar["epoch"] = outcome.best_epoch.into();
    let p = dir.join("metrics.json");
    fs::write(&p, serde_json::to_string_pretty(&sidecar).expect("json")).map_err(io_err(&p))?;
    Ok(())
}

/// Appends each epoch to `log.jsonl` as soon as it is finished.
fn log_writer(run: &RunConfig) -> Result<impl FnMut(&EpochLog) -> bool> {
    fs::create_dir_all(&run.output_dir).map_err(io_err(&run.output_dir))?;
    let path = run.output_dir.join("log.jsonl");
    let mut file = fs::File::create(&path).map_err(io_err(&path))?;
    Ok(move |e: &EpochLog| {
        let line = serde_json::to_string(e).expect("json");
        writeln!(file, "{line}").is_ok()
    })
}

fn init_from(run: &RunConfig) -> Result<Option<(ParamStore, Vocabulary)>> {
    match &run.init_checkpoint {
        None => Ok(None),
        Some(path) => {
            let (store, vocab, _) = load_run_checkpoint(path)?;
            Ok(Some((store, vocab)))
        }
    }
}

/// `train` subcommand: monolingual training from `train_path`, selected on
/// `dev_path`. With `init_checkpoint` the run continues from that
/// checkpoint. When `parallel_train_path` is set, its target tokens are
/// added to the vocabulary so a later shared-encoder joint run can embed
/// them.
pub fn train(run: &RunConfig) -> Result<TrainOutcome> {
    run.validate()?;
    let train = load_corpus(required(&run.train_path, "train_path")?)?;
    let dev = load_corpus(required(&run.dev_path, "dev_path")?)?;
    let ckpt = init_from(run)?;
    let init = match &ckpt {
        Some((store, vocab)) => Init::Checkpoint { store, vocab },
        None => {
            let mut vocab = Vocabulary::build(&train)?;
            if let Some(p) = &run.parallel_train_path {
                for pdoc in load_parallel(p)? {
                    vocab.extend(pdoc.target_tokens());
                }
            }
            Init::Fresh(vocab)
        }
    };
    let outcome = train_documents(run, &train, &dev, init, log_writer(run)?)?;
    write_outputs(run, &outcome, &dev)?;
    Ok(outcome)
}

/// `train-xl` subcommand: joint training on `parallel_train_path`.
pub fn train_xl(run: &RunConfig) -> Result<TrainOutcome> {
    run.validate()?;
    let parallel = load_parallel(required(&run.parallel_train_path, "parallel_train_path")?)?;
    let dev = load_corpus(required(&run.dev_path, "dev_path")?)?;
    let ckpt = init_from(run)?;
    let init = match &ckpt {
        Some((store, vocab)) => Init::Checkpoint { store, vocab },
        None => {
            let sources: Vec<Document> = parallel.iter().map(|p| p.source.clone()).collect();
            let mut vocab = Vocabulary::build(&sources)?;
            if run.model()?.encoder_mode == EncoderMode::Shared {
                vocab.extend(parallel.iter().flat_map(|p| p.target_tokens()));
            }
            Init::Fresh(vocab)
        }
    };
    let outcome = train_parallel(run, &parallel, &dev, init, log_writer(run)?)?;
    write_outputs(run, &outcome, &dev)?;
    Ok(outcome)
}
