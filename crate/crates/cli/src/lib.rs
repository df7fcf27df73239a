//! Experiment runner for the extlap library: configuration, the verification suites, a disk
//! cache for spectral mode tables, and report emission.

pub mod cache;
pub mod config;
pub mod experiments;
pub mod output;
