//! Documents, vocabularies, synthetic data and pseudo-translation.

mod document;
mod toy;
mod translate;
mod vocab;

pub use document::{Document, ParallelDocument, Span};
pub use toy::generate_toy_corpus;
pub use translate::{pseudo_translate, translation_seed, xenoglot_token, TranslationMode, SWAP_PROBABILITY};
pub use vocab::{Vocabulary, PAD, UNK};
