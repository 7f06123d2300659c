//! Token encoder, span representations, mention scoring and pruning.

mod config;
mod encoder;
mod init;
mod spans;

pub use config::{EncoderMode, ModelConfig, Side, WindowIndexing, ADAPTER_HIDDEN, DISTANCE_BUCKETS};
pub use encoder::{adapter, encode, mention_scores, span_representations, SideEncoding};
pub use init::{init_adapters, init_params, init_target_encoder, param_prefix};
pub use spans::{bucket, enumerate_spans, prune_spans, pruned_count, ScoredSpan};
