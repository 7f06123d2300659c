use alloc::string::String;
use core::fmt;
use core::str::FromStr;

/// Hidden width of each adapter's feed-forward layer.
pub const ADAPTER_HIDDEN: usize = 500;

/// Number of buckets in the width and distance feature tables.
pub const DISTANCE_BUCKETS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncoderMode {
    /// Source and target text go through one set of encoder parameters.
    Shared,
    /// The target side gets its own embedding table and recurrent layer.
    Separate,
}

impl fmt::Display for EncoderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncoderMode::Shared => "shared",
            EncoderMode::Separate => "separate",
        })
    }
}

impl FromStr for EncoderMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "shared" => Ok(EncoderMode::Shared),
            "separate" => Ok(EncoderMode::Separate),
            other => Err(alloc::format!("unknown encoder_mode `{other}` (expected shared or separate)")),
        }
    }
}

/// Which token positions the cross-lingual window compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowIndexing {
    /// Document-level token index of the mention start.
    Document,
    /// Index of the mention start within its own sentence.
    Sentence,
}

impl fmt::Display for WindowIndexing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowIndexing::Document => "document",
            WindowIndexing::Sentence => "sentence",
        })
    }
}

impl FromStr for WindowIndexing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "document" => Ok(WindowIndexing::Document),
            "sentence" => Ok(WindowIndexing::Sentence),
            other => Err(alloc::format!("unknown window_indexing `{other}` (expected document or sentence)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub embed_dim: usize,
    /// Per-direction recurrent state size; token states have `2 * hidden_dim`.
    pub hidden_dim: usize,
    pub width_feature_dim: usize,
    /// Hidden layer size of the mention and pair scorers.
    pub ffn_hidden: usize,
    pub adapter_hidden: usize,
    pub max_span_width: usize,
    pub span_ratio: f64,
    pub max_spans: usize,
    pub max_antecedents: usize,
    pub encoder_mode: EncoderMode,
    pub window: usize,
    pub window_indexing: WindowIndexing,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            embed_dim: 32,
            hidden_dim: 16,
            width_feature_dim: 8,
            ffn_hidden: 64,
            adapter_hidden: ADAPTER_HIDDEN,
            max_span_width: 10,
            span_ratio: 0.4,
            max_spans: 50,
            max_antecedents: 50,
            encoder_mode: EncoderMode::Shared,
            window: 50,
            window_indexing: WindowIndexing::Document,
        }
    }
}

impl ModelConfig {
    pub fn state_dim(&self) -> usize {
        2 * self.hidden_dim
    }

    /// first ⊕ last ⊕ head ⊕ width feature.
    pub fn span_dim(&self) -> usize {
        3 * self.state_dim() + self.width_feature_dim
    }

    /// Input size of the pair scorer: `[g_i, g_j, g_i ∘ g_j, φ]`.
    pub fn pair_dim(&self) -> usize {
        3 * self.span_dim() + self.width_feature_dim
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("embed_dim", self.embed_dim),
            ("hidden_dim", self.hidden_dim),
            ("width_feature_dim", self.width_feature_dim),
            ("ffn_hidden", self.ffn_hidden),
            ("adapter_hidden", self.adapter_hidden),
            ("max_span_width", self.max_span_width),
            ("max_spans", self.max_spans),
            ("max_antecedents", self.max_antecedents),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(alloc::format!("{name} must be at least 1"));
            }
        }
        if !(self.span_ratio > 0.0 && self.span_ratio <= 1.0) {
            return Err(alloc::format!("span_ratio must be in (0, 1], got {}", self.span_ratio));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_dimension_matches_construction() {
        let cfg = ModelConfig { hidden_dim: 8, width_feature_dim: 8, ..ModelConfig::default() };
        assert_eq!(cfg.span_dim(), 56);
    }

    #[test]
    fn rejects_bad_ratio() {
        let cfg = ModelConfig { span_ratio: 0.0, ..ModelConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = ModelConfig { span_ratio: 1.5, ..ModelConfig::default() };
        assert!(cfg.validate().is_err());
        assert!(ModelConfig::default().validate().is_ok());
    }
}
