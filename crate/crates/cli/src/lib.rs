//! Command-line harness around the `eigenscale` library.
//!
//! Every run is described by a [`config::RunConfig`]. When data goes to a
//! file, the config is stored in `<out>.manifest.json`, and `replay` reruns
//! it to reproduce the data files byte for byte.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, run_from};
pub use error::CliError;
