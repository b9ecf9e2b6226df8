//! Command-line reports over a multiplex network: one subcommand per
//! analysis, each writing CSV or JSON tables into the output directory.
//!
//! All randomness descends from `--seed`. Community detection on a layer
//! uses a seed derived from the root seed, the layer name and the node
//! scope, so commands that need the same partition agree on it.

pub mod args;
pub mod cache;
pub mod commands;
pub mod context;
pub mod table;

pub use args::Cli;
pub use commands::run;
