//! Batch front end for `thincomb-core`: TOML job configs, JSON reports, DOT
//! export and a content-addressed report cache.

pub mod config;
pub mod dot;
pub mod report;
pub mod run;

pub use config::JobConfig;
pub use run::execute;
