//! Command-line front end and verification suites for `voa-core`.

pub mod cli;
pub mod config;
pub mod json;
pub mod suites;

pub use voa_core;
