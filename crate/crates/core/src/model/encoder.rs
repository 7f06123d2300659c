use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::config::{ModelConfig, Side};
use super::init::param_prefix;
use super::spans::{bucket, enumerate_spans, prune_spans, ScoredSpan};
use crate::autodiff::{Graph, Tensor, Var};
use crate::corpus::Span;
use crate::{Error, Result};

/// Contextual token states, one `2H` row per token, sentence by sentence.
///
/// A bidirectional LSTM runs over each sentence independently; the
/// recurrent state is reset at every sentence boundary.
pub fn encode(g: &mut Graph<'_>, cfg: &ModelConfig, prefix: &str, sentences: &[Vec<usize>]) -> Result<Var> {
    let embed = g.param(&format!("{prefix}embed"))?;
    let vocab = g.shape(embed)[0];
    if let Some(&id) = sentences.iter().flatten().find(|&&id| id >= vocab) {
        return Err(Error::TokenOutOfRange { id, vocab });
    }
    let mut blocks = Vec::with_capacity(sentences.len());
    for ids in sentences.iter().filter(|s| !s.is_empty()) {
        let x = g.gather_rows(embed, ids)?;
        let fw = run_lstm(g, cfg, &format!("{prefix}fw"), x, false)?;
        let bw = run_lstm(g, cfg, &format!("{prefix}bw"), x, true)?;
        blocks.push(g.concat(&[fw, bw], 1)?);
    }
    if blocks.is_empty() {
        return Err(Error::Shape { op: "encode", detail: "document has no tokens".into() });
    }
    if blocks.len() == 1 {
        return Ok(blocks[0]);
    }
    g.concat(&blocks, 0)
}

fn run_lstm(g: &mut Graph<'_>, cfg: &ModelConfig, prefix: &str, x: Var, reverse: bool) -> Result<Var> {
    let h_dim = cfg.hidden_dim;
    let wx = g.param(&format!("{prefix}.wx"))?;
    let wh = g.param(&format!("{prefix}.wh"))?;
    let b = g.param(&format!("{prefix}.b"))?;
    let n = g.shape(x)[0];
    let proj = g.matmul(x, wx)?;
    let proj = g.add_row(proj, b)?;

    let mut h = g.input(Tensor::zeros(1, h_dim))?;
    let mut c = g.input(Tensor::zeros(1, h_dim))?;
    let mut states = vec![h; n];
    let order: Vec<usize> = if reverse { (0..n).rev().collect() } else { (0..n).collect() };
    for t in order {
        let xt = g.gather_rows(proj, &[t])?;
        let rec = g.matmul(h, wh)?;
        let z = g.add(xt, rec)?;
        let i = g.slice_cols(z, 0, h_dim)?;
        let i = g.sigmoid(i)?;
        let f = g.slice_cols(z, h_dim, h_dim)?;
        let f = g.sigmoid(f)?;
        let o = g.slice_cols(z, 2 * h_dim, h_dim)?;
        let o = g.sigmoid(o)?;
        let u = g.slice_cols(z, 3 * h_dim, h_dim)?;
        let u = g.tanh(u)?;
        let keep = g.mul(f, c)?;
        let write = g.mul(i, u)?;
        c = g.add(keep, write)?;
        let squashed = g.tanh(c)?;
        h = g.mul(o, squashed)?;
        states[t] = h;
    }
    if n == 1 {
        return Ok(states[0]);
    }
    g.concat(&states, 0)
}

/// Span representations `[first, last, head, width]`, one row per span.
///
/// The head is an attention-weighted sum of the span's token states with
/// weights normalized over the span only.
pub fn span_representations(g: &mut Graph<'_>, prefix: &str, states: Var, spans: &[Span]) -> Result<Var> {
    let t = g.shape(states)[0];
    if let Some(bad) = spans.iter().find(|s| s.end >= t) {
        return Err(Error::Shape { op: "span_representations", detail: format!("span {bad} beyond {t} tokens") });
    }
    let starts: Vec<usize> = spans.iter().map(|s| s.start).collect();
    let ends: Vec<usize> = spans.iter().map(|s| s.end).collect();
    let first = g.gather_rows(states, &starts)?;
    let last = g.gather_rows(states, &ends)?;

    let att_w = g.param(&format!("{prefix}att.w"))?;
    let att_b = g.param(&format!("{prefix}att.b"))?;
    let logits = g.matmul(states, att_w)?;
    let logits = g.add_row(logits, att_b)?;
    let logits = g.transpose(logits)?;
    let ones = g.input(Tensor::filled(spans.len(), 1, 1.0))?;
    let grid = g.matmul(ones, logits)?;
    let mut mask = vec![false; spans.len() * t];
    for (r, s) in spans.iter().enumerate() {
        mask[r * t + s.start..=r * t + s.end].fill(true);
    }
    let weights = g.softmax_rows(grid, Some(&mask))?;
    let head = g.matmul(weights, states)?;

    let table = g.param(&format!("{prefix}width"))?;
    let buckets: Vec<usize> = spans.iter().map(|s| bucket(s.width())).collect();
    let width = g.gather_rows(table, &buckets)?;
    g.concat(&[first, last, head, width], 1)
}

/// Residual adapter `x + relu(x·W1 + b1)·W2 + b2`.
pub fn adapter(g: &mut Graph<'_>, name: &str, x: Var) -> Result<Var> {
    let delta = g.ffn(name, x)?;
    g.add(x, delta)
}

/// Mention scores `FFN_m(g)` (`FFN_m(adapter_m(g))` with `adapted`), `S×1`.
pub fn mention_scores(g: &mut Graph<'_>, reps: Var, adapted: bool) -> Result<Var> {
    let input = if adapted { adapter(g, "adapter_m", reps)? } else { reps };
    g.ffn("mention.ffn", input)
}

/// Everything computed for one side of a document: all candidate spans with
/// representations and mention scores, and the pruned subset.
#[derive(Clone, Debug)]
pub struct SideEncoding {
    pub spans: Vec<Span>,
    pub reps: Var,
    pub scores: Var,
    pub pruned: Vec<ScoredSpan>,
    /// Sentence-local start offset of every token.
    pub local_positions: Vec<usize>,
}

impl SideEncoding {
    /// Encodes one side. Target sides in cross-lingual mode pass
    /// `adapted = true` so their mention scores go through `adapter_m`.
    pub fn build(g: &mut Graph<'_>, cfg: &ModelConfig, side: Side, sentences: &[Vec<usize>], adapted: bool) -> Result<Self> {
        let prefix = param_prefix(cfg, side);
        let lengths: Vec<usize> = sentences.iter().map(Vec::len).collect();
        let token_count: usize = lengths.iter().sum();
        let states = encode(g, cfg, prefix, sentences)?;
        let spans = enumerate_spans(&lengths, cfg.max_span_width);
        let reps = span_representations(g, prefix, states, &spans)?;
        let scores = mention_scores(g, reps, adapted)?;
        let values = g.value(scores).data();
        let scored: Vec<ScoredSpan> = spans
            .iter()
            .zip(values)
            .enumerate()
            .map(|(index, (&span, &score))| ScoredSpan { span, index, score })
            .collect();
        let pruned = prune_spans(&scored, token_count, cfg.span_ratio, cfg.max_spans);
        let local_positions = lengths.iter().flat_map(|&len| 0..len).collect();
        Ok(SideEncoding { spans, reps, scores, pruned, local_positions })
    }

    pub fn pruned_indices(&self) -> Vec<usize> {
        self.pruned.iter().map(|s| s.index).collect()
    }

    pub fn pruned_spans(&self) -> Vec<Span> {
        self.pruned.iter().map(|s| s.span).collect()
    }
}
