//! Library side of the `corridor` binary: run configuration and report
//! serialization, split out so integration tests can exercise them directly.

pub mod config;
pub mod output;
