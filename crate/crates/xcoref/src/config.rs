use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xcoref_core::autodiff::AdamConfig;
use xcoref_core::model::{EncoderMode, ModelConfig, WindowIndexing};

use crate::error::{io_err, HarnessError, Result};

/// Everything a run needs. Loaded from TOML, then adjusted by `key=value`
/// overrides; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub train_path: Option<PathBuf>,
    pub dev_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
    pub parallel_train_path: Option<PathBuf>,
    pub init_checkpoint: Option<PathBuf>,
    pub output_dir: PathBuf,

    pub epochs: usize,
    pub seed: u64,
    pub loss_ratio: f64,

    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub width_feature_dim: usize,
    pub ffn_hidden: usize,
    pub adapter_hidden: usize,
    pub max_span_width: usize,
    pub span_ratio: f64,
    pub max_spans: usize,
    pub max_antecedents: usize,
    pub encoder_mode: String,
    pub window: usize,
    pub window_indexing: String,

    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let m = ModelConfig::default();
        let a = AdamConfig::default();
        RunConfig {
            train_path: None,
            dev_path: None,
            test_path: None,
            parallel_train_path: None,
            init_checkpoint: None,
            output_dir: PathBuf::from("runs/default"),
            epochs: 24,
            seed: 0,
            loss_ratio: 1.0,
            embed_dim: m.embed_dim,
            hidden_dim: m.hidden_dim,
            width_feature_dim: m.width_feature_dim,
            ffn_hidden: m.ffn_hidden,
            adapter_hidden: m.adapter_hidden,
            max_span_width: m.max_span_width,
            span_ratio: m.span_ratio,
            max_spans: m.max_spans,
            max_antecedents: m.max_antecedents,
            encoder_mode: m.encoder_mode.to_string(),
            window: m.window,
            window_indexing: m.window_indexing.to_string(),
            learning_rate: a.lr,
            beta1: a.beta1,
            beta2: a.beta2,
            adam_epsilon: a.eps,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies `key=value` overrides. Values are read as TOML literals when
    /// they parse as one and as plain strings otherwise; an empty value
    /// clears an optional key.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(&self.to_toml()).expect("own output parses");
        for o in overrides {
            let o = o.as_ref();
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("override `{o}` is not key=value")))?;
            let key = key.trim();
            let value = value.trim();
            if value.is_empty() {
                table.remove(key);
                continue;
            }
            let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(value.to_string()));
            table.insert(key.to_string(), parsed);
        }
        let text = toml::to_string(&table).expect("table serializes");
        Self::from_toml(&text)
    }

    pub fn model(&self) -> Result<ModelConfig> {
        let encoder_mode: EncoderMode = self.encoder_mode.parse().map_err(HarnessError::Config)?;
        let window_indexing: WindowIndexing = self.window_indexing.parse().map_err(HarnessError::Config)?;
        let m = ModelConfig {
            embed_dim: self.embed_dim,
            hidden_dim: self.hidden_dim,
            width_feature_dim: self.width_feature_dim,
            ffn_hidden: self.ffn_hidden,
            adapter_hidden: self.adapter_hidden,
            max_span_width: self.max_span_width,
            span_ratio: self.span_ratio,
            max_spans: self.max_spans,
            max_antecedents: self.max_antecedents,
            encoder_mode,
            window: self.window,
            window_indexing,
        };
        m.validate().map_err(HarnessError::Config)?;
        Ok(m)
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig { lr: self.learning_rate, beta1: self.beta1, beta2: self.beta2, eps: self.adam_epsilon }
    }

    pub fn validate(&self) -> Result<()> {
        self.model()?;
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if !(self.loss_ratio.is_finite() && self.loss_ratio >= 0.0) {
            return bad("loss_ratio must be a finite non-negative number");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if !((0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2)) {
            return bad("beta1 and beta2 must lie in [0, 1)");
        }
        if !(self.adam_epsilon.is_finite() && self.adam_epsilon > 0.0) {
            return bad("adam_epsilon must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(cfg.model().unwrap(), ModelConfig::default());
    }

    #[test]
    fn unknown_key_rejected() {
        let err = RunConfig::from_toml("epochz = 3").unwrap_err().to_string();
        assert!(err.contains("epochz"), "{err}");
        assert!(RunConfig::default().with_overrides(&["nope=1"]).is_err());
    }

    #[test]
    fn overrides_apply_and_parse() {
        let cfg = RunConfig::default()
            .with_overrides(&["epochs=3", "train_path=data/train.jsonl", "encoder_mode=separate", "loss_ratio=0.5"])
            .unwrap();
        assert_eq!(cfg.epochs, 3);
        assert_eq!(cfg.train_path.as_deref(), Some(Path::new("data/train.jsonl")));
        assert_eq!(cfg.model().unwrap().encoder_mode, EncoderMode::Separate);
        assert_eq!(cfg.loss_ratio, 0.5);
        let cleared = cfg.with_overrides(&["train_path="]).unwrap();
        assert_eq!(cleared.train_path, None);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(RunConfig::from_toml("encoder_mode = \"both\"").is_err());
        assert!(RunConfig::from_toml("loss_ratio = -1.0").is_err());
        assert!(RunConfig::from_toml("hidden_dim = 0").is_err());
        assert!(RunConfig::default().with_overrides(&["epochs"]).is_err());
    }
}
