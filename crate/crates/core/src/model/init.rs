use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::config::{EncoderMode, ModelConfig, Side, DISTANCE_BUCKETS};
use crate::autodiff::{ParamStore, Tensor};
use crate::Result;

/// Name prefix of the encoder parameters used for `side`.
pub fn param_prefix(cfg: &ModelConfig, side: Side) -> &'static str {
    match (side, cfg.encoder_mode) {
        (Side::Target, EncoderMode::Separate) => "tgt.",
        _ => "src.",
    }
}

/// `U(-1/√fan_in, 1/√fan_in)`.
fn uniform(rng: &mut impl Rng, rows: usize, cols: usize, fan_in: usize) -> Tensor {
    let bound = 1.0 / libm::sqrt(fan_in as f64);
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-bound..bound)).collect();
    Tensor::from_vec(rows, cols, data).expect("sized by construction")
}

fn insert_encoder(store: &mut ParamStore, cfg: &ModelConfig, prefix: &str, vocab_size: usize, rng: &mut impl Rng) -> Result<()> {
    let (e, h, w) = (cfg.embed_dim, cfg.hidden_dim, cfg.width_feature_dim);
    store.insert(&format!("{prefix}embed"), uniform(rng, vocab_size, e, e), true)?;
    for dir in ["fw", "bw"] {
        store.insert(&format!("{prefix}{dir}.wx"), uniform(rng, e, 4 * h, e + h), true)?;
        store.insert(&format!("{prefix}{dir}.wh"), uniform(rng, h, 4 * h, e + h), true)?;
        store.insert(&format!("{prefix}{dir}.b"), Tensor::zeros(1, 4 * h), true)?;
    }
    store.insert(&format!("{prefix}att.w"), uniform(rng, 2 * h, 1, 2 * h), true)?;
    store.insert(&format!("{prefix}att.b"), Tensor::zeros(1, 1), true)?;
    store.insert(&format!("{prefix}width"), uniform(rng, DISTANCE_BUCKETS, w, w), true)?;
    Ok(())
}

fn insert_ffn(store: &mut ParamStore, prefix: &str, input: usize, hidden: usize, rng: &mut impl Rng) -> Result<()> {
    store.insert(&format!("{prefix}.w1"), uniform(rng, input, hidden, input), true)?;
    store.insert(&format!("{prefix}.b1"), Tensor::zeros(1, hidden), true)?;
    store.insert(&format!("{prefix}.w2"), uniform(rng, hidden, 1, hidden), true)?;
    store.insert(&format!("{prefix}.b2"), Tensor::zeros(1, 1), true)?;
    Ok(())
}

/// Source-side encoder, span head and the two shared scorers. Weight
/// matrices are scaled uniform by fan-in, biases zero.
pub fn init_params(cfg: &ModelConfig, vocab_size: usize, rng: &mut impl Rng) -> Result<ParamStore> {
    let mut store = ParamStore::new();
    insert_encoder(&mut store, cfg, "src.", vocab_size, rng)?;
    insert_ffn(&mut store, "mention.ffn", cfg.span_dim(), cfg.ffn_hidden, rng)?;
    let w = cfg.width_feature_dim;
    store.insert("coref.dist", uniform(rng, DISTANCE_BUCKETS, w, w), true)?;
    insert_ffn(&mut store, "coref.ffn", cfg.pair_dim(), cfg.ffn_hidden, rng)?;
    Ok(store)
}

/// Separate target-side encoder (`tgt.*`), only used with
/// [`EncoderMode::Separate`].
pub fn init_target_encoder(store: &mut ParamStore, cfg: &ModelConfig, vocab_size: usize, rng: &mut impl Rng) -> Result<()> {
    insert_encoder(store, cfg, "tgt.", vocab_size, rng)
}

/// Residual adapters `adapter_m` and `adapter_c`: random first layer, zero
/// output projection, so each starts as the identity map.
pub fn init_adapters(store: &mut ParamStore, cfg: &ModelConfig, rng: &mut impl Rng) -> Result<Vec<String>> {
    let (d, a) = (cfg.span_dim(), cfg.adapter_hidden);
    let mut names = Vec::new();
    for prefix in ["adapter_m", "adapter_c"] {
        let entries = [
            (format!("{prefix}.w1"), uniform(rng, d, a, d)),
            (format!("{prefix}.b1"), Tensor::zeros(1, a)),
            (format!("{prefix}.w2"), Tensor::zeros(a, d)),
            (format!("{prefix}.b2"), Tensor::zeros(1, d)),
        ];
        for (name, t) in entries {
            store.insert(&name, t, true)?;
            names.push(name);
        }
    }
    Ok(names)
}
