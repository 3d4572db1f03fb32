//! File formats, synthetic corpora and the command-line pipeline around
//! [`shiftlearn_core`].

pub mod catalogue;
pub mod config;
pub mod error;
pub mod files;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use config::RunConfig;
pub use error::{CliError, Result};
