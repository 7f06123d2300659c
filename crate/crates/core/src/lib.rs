//! Span-ranking coreference resolution with an unsupervised cross-lingual
//! auxiliary objective.
//!
//! This crate is `no_std` (it needs `alloc`) and carries everything that is
//! pure computation: the document model and toy data generators, a small
//! reverse-mode autodiff engine with an adaptive-moment optimizer, the span
//! encoder and scorers, antecedent decoding, the cross-lingual score matrix
//! and loss, and the coreference metrics. File formats, configuration and the
//! command line live in the `xcoref` companion crate.

#![no_std]
#![deny(rust_2018_idioms)]

extern crate alloc;

pub mod autodiff;
pub mod coref;
pub mod corpus;
mod error;
pub mod metrics;
pub mod model;
pub mod xlingual;

pub use error::{Error, Result};
