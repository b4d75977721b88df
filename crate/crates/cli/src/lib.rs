//! Experiment orchestration for the hamlaw toolkit: config files, trial
//! loops, statistics aggregation, and the CSV/JSON output contract. The
//! binary in this crate is a thin argument layer over these modules, so
//! integration tests can drive runs in-process and through the executable
//! with identical results.

pub mod config;
pub mod experiment;
