//! Command-line front end for the tipping toolkit: configuration parsing,
//! run orchestration, and deterministic CSV emission.

pub mod analyses;
pub mod config;
pub mod exec;
pub mod output;
