use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Inclusive document-level token interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end, "span start after end");
        Span { start, end }
    }

    pub fn width(&self) -> usize {
        self.end - self.start + 1
    }

    /// Partial overlap: the spans intersect but neither contains the other.
    pub fn crosses(&self, other: &Span) -> bool {
        (self.start < other.start && other.start <= self.end && self.end < other.end)
            || (other.start < self.start && self.start <= other.end && other.end < self.end)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// A tokenized document with gold coreference clusters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub doc_key: String,
    pub sentences: Vec<Vec<String>>,
    pub clusters: Vec<Vec<Span>>,
}

impl Document {
    /// Builds and validates a document.
    pub fn new(doc_key: String, sentences: Vec<Vec<String>>, clusters: Vec<Vec<Span>>) -> Result<Self> {
        let doc = Document { doc_key, sentences, clusters };
        doc.validate()?;
        Ok(doc)
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn sentence_lengths(&self) -> Vec<usize> {
        self.sentences.iter().map(Vec::len).collect()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().flatten().map(String::as_str)
    }

    /// Sentence index of each token.
    pub fn sentence_map(&self) -> Vec<usize> {
        sentence_map(&self.sentence_lengths())
    }

    pub fn surface(&self, span: Span) -> Vec<&str> {
        self.tokens().skip(span.start).take(span.width()).collect()
    }

    /// All mentions of all gold clusters.
    pub fn mentions(&self) -> BTreeSet<Span> {
        self.clusters.iter().flatten().copied().collect()
    }

    fn invalid(&self, detail: String) -> Error {
        Error::Validation { doc_key: self.doc_key.clone(), detail }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.token_count();
        let sent = self.sentence_map();
        let mut seen = BTreeSet::new();
        for (ci, cluster) in self.clusters.iter().enumerate() {
            if cluster.len() < 2 {
                return Err(self.invalid(format!("cluster {ci} has {} mention(s); singletons are not allowed", cluster.len())));
            }
            for span in cluster {
                if span.start > span.end {
                    return Err(self.invalid(format!("span {span} has start after end")));
                }
                if span.end >= n {
                    return Err(self.invalid(format!("span {span} out of range for {n} tokens")));
                }
                if sent[span.start] != sent[span.end] {
                    return Err(self.invalid(format!("span {span} crosses a sentence boundary")));
                }
                if !seen.insert(*span) {
                    return Err(self.invalid(format!("span {span} appears in more than one cluster position")));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn sentence_map(lengths: &[usize]) -> Vec<usize> {
    lengths
        .iter()
        .enumerate()
        .flat_map(|(i, &len)| core::iter::repeat(i).take(len))
        .collect()
}

/// A source document paired with an unannotated target-side token sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelDocument {
    pub source: Document,
    pub target_sentences: Vec<Vec<String>>,
    /// Only attached in analysis mode.
    pub target_clusters: Option<Vec<Vec<Span>>>,
}

impl ParallelDocument {
    pub fn new(
        source: Document,
        target_sentences: Vec<Vec<String>>,
        target_clusters: Option<Vec<Vec<Span>>>,
    ) -> Result<Self> {
        let pdoc = ParallelDocument { source, target_sentences, target_clusters };
        pdoc.validate()?;
        Ok(pdoc)
    }

    pub fn target_token_count(&self) -> usize {
        self.target_sentences.iter().map(Vec::len).sum()
    }

    pub fn target_sentence_lengths(&self) -> Vec<usize> {
        self.target_sentences.iter().map(Vec::len).collect()
    }

    pub fn target_tokens(&self) -> impl Iterator<Item = &str> {
        self.target_sentences.iter().flatten().map(String::as_str)
    }

    /// The target side viewed as a document (with target clusters if any).
    pub fn target_document(&self) -> Document {
        Document {
            doc_key: self.source.doc_key.clone(),
            sentences: self.target_sentences.clone(),
            clusters: self.target_clusters.clone().unwrap_or_default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        if self.target_token_count() == 0 {
            return Err(Error::Validation {
                doc_key: self.source.doc_key.clone(),
                detail: String::from("target side has no tokens"),
            });
        }
        if self.target_clusters.is_some() {
            self.target_document().validate()?;
        }
        Ok(())
    }
}
