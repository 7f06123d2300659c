use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Document, ParallelDocument};
use crate::{Error, Result};

/// Chance that an adjacent target token pair is swapped in xenoglot mode.
pub const SWAP_PROBABILITY: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TranslationMode {
    /// Target tokens are the source tokens, verbatim.
    Identity,
    /// Every token is rewritten into a disjoint "language" and nearby
    /// tokens are occasionally reordered.
    Xenoglot,
}

impl fmt::Display for TranslationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TranslationMode::Identity => "identity",
            TranslationMode::Xenoglot => "xenoglot",
        })
    }
}

impl FromStr for TranslationMode {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "identity" => Ok(TranslationMode::Identity),
            "xenoglot" => Ok(TranslationMode::Xenoglot),
            other => Err(alloc::format!("unknown translation mode `{other}` (expected identity or xenoglot)")),
        }
    }
}

/// `zx_` followed by the characters of `token` in reverse order.
pub fn xenoglot_token(token: &str) -> String {
    let mut out = String::with_capacity(token.len() + 3);
    out.push_str("zx_");
    out.extend(token.chars().rev());
    out
}

/// Seed of the swap generator for one document: the run seed mixed with an
/// FNV-1a hash of the document key.
pub fn translation_seed(seed: u64, doc_key: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in doc_key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ seed
}

/// Deterministic stand-in for machine translation.
///
/// Sentences stay aligned 1:1 with the source. In xenoglot mode each sentence
/// is scanned left to right; at every position a draw below
/// [`SWAP_PROBABILITY`] swaps that token with its right neighbour, and the
/// scan resumes after the swapped pair. The target side never carries
/// annotations; see [`ParallelDocument::with_analysis_clusters`].
pub fn pseudo_translate(doc: &Document, mode: TranslationMode, seed: u64) -> ParallelDocument {
    let target_sentences = match mode {
        TranslationMode::Identity => doc.sentences.clone(),
        TranslationMode::Xenoglot => {
            let mut rng = ChaCha8Rng::seed_from_u64(translation_seed(seed, &doc.doc_key));
            doc.sentences
                .iter()
                .map(|sentence| {
                    let mut out: Vec<String> = sentence.iter().map(|t| xenoglot_token(t)).collect();
                    let mut p = 0;
                    while p + 1 < out.len() {
                        if rng.gen::<f64>() < SWAP_PROBABILITY {
                            out.swap(p, p + 1);
                            p += 2;
                        } else {
                            p += 1;
                        }
                    }
                    out
                })
                .collect()
        }
    };
    ParallelDocument { source: doc.clone(), target_sentences, target_clusters: None }
}

impl ParallelDocument {
    /// True when the target tokens equal the source tokens.
    pub fn is_identity(&self) -> bool {
        self.target_sentences == self.source.sentences
    }

    /// Copies the source clusters onto the target side. Only meaningful for
    /// identity translations, where spans line up by index.
    pub fn with_analysis_clusters(mut self) -> Result<Self> {
        if !self.is_identity() {
            return Err(Error::Analysis(alloc::format!(
                "document `{}` is not an identity translation",
                self.source.doc_key
            )));
        }
        self.target_clusters = Some(self.source.clusters.clone());
        Ok(self)
    }
}
