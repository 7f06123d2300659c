//! Files, configuration, training drivers and the `xcoref` command line
//! around [`xcoref_core`].

pub mod analyze;
pub mod checkpoint;
pub mod config;
mod error;
pub mod evaluate;
pub mod io;
pub mod train;

pub use error::{HarnessError, Result};
