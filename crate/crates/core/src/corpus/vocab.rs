use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::Document;
use crate::{Error, Result};

pub const PAD: usize = 0;
pub const UNK: usize = 1;

const PAD_TOKEN: &str = "<pad>";
const UNK_TOKEN: &str = "<unk>";

/// Token ↔ id map. Ids 0 and 1 are reserved for padding and unknown tokens;
/// known tokens get ids in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    ids: BTreeMap<String, usize>,
    tokens: Vec<String>,
}

impl Vocabulary {
    pub fn build(corpus: &[Document]) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(Self::from_tokens(corpus.iter().flat_map(Document::tokens)))
    }

    pub fn from_tokens<'a>(tokens: impl IntoIterator<Item = &'a str>) -> Self {
        let mut vocab = Vocabulary {
            ids: BTreeMap::new(),
            tokens: vec![String::from(PAD_TOKEN), String::from(UNK_TOKEN)],
        };
        vocab.extend(tokens);
        vocab
    }

    /// Adds unseen tokens, keeping existing ids.
    pub fn extend<'a>(&mut self, tokens: impl IntoIterator<Item = &'a str>) {
        for tok in tokens {
            if !self.ids.contains_key(tok) {
                self.ids.insert(String::from(tok), self.tokens.len());
                self.tokens.push(String::from(tok));
            }
        }
    }

    /// Rebuilds a vocabulary from its id-ordered token list (reserved
    /// entries included), as written by [`Vocabulary::tokens`].
    pub fn from_id_order(tokens: Vec<String>) -> Result<Self> {
        if tokens.len() < 2 || tokens[PAD] != PAD_TOKEN || tokens[UNK] != UNK_TOKEN {
            return Err(Error::Checkpoint(String::from("vocabulary must start with <pad>, <unk>")));
        }
        let mut ids = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate().skip(2) {
            if ids.insert(t.clone(), i).is_some() {
                return Err(Error::Checkpoint(alloc::format!("duplicate vocabulary entry `{t}`")));
            }
        }
        Ok(Vocabulary { ids, tokens })
    }

    /// Size including the reserved ids.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.len() <= 2
    }

    pub fn id(&self, token: &str) -> usize {
        self.ids.get(token).copied().unwrap_or(UNK)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn encode(&self, sentences: &[Vec<String>]) -> Vec<Vec<usize>> {
        sentences.iter().map(|s| s.iter().map(|t| self.id(t)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn doc(tokens: &[&str]) -> Document {
        Document::new("v".into(), vec![tokens.iter().map(|t| String::from(*t)).collect()], vec![]).unwrap()
    }

    #[test]
    fn two_types_plus_reserved() {
        let v = Vocabulary::build(&[doc(&["a", "b", "a"])]).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v.id("zzz"), UNK);
    }

    #[test]
    fn ids_round_trip() {
        let v = Vocabulary::build(&[doc(&["x", "y", "z"])]).unwrap();
        for t in ["x", "y", "z"] {
            assert_eq!(v.token(v.id(t)), Some(t));
        }
        assert_eq!(Vocabulary::from_id_order(v.tokens().to_vec()).unwrap(), v);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert_eq!(Vocabulary::build(&[]), Err(Error::EmptyCorpus));
    }
}
