//! A small tape-based reverse-mode differentiation engine.
//!
//! Values are dense row-major `f64` matrices. A [`Graph`] records every
//! operation applied during one forward pass; [`Graph::backward`] walks the
//! tape in reverse and returns gradients keyed by parameter name. Parameters
//! live in a [`ParamStore`] that also carries the optimizer moments and
//! serializes to a versioned little-endian checkpoint.

mod adam;
mod gradcheck;
mod graph;
mod params;
mod tensor;

pub use adam::{adam_step, AdamConfig};
pub use gradcheck::{grad_check, GradCheckReport};
pub use graph::{Gradients, Graph, Var};
pub use params::{ParamEntry, ParamStore, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use tensor::Tensor;
