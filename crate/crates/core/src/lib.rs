//! Core library for sampling random uniform hypergraphs, counting Hamilton
//! l-cycles exactly, and testing the distributional behaviour of the count.

#![forbid(unsafe_code)]

pub mod aut;
pub mod binom;
pub mod count;
pub mod error;
pub mod graph;
pub mod models;
pub mod oracle;
pub mod params;
pub mod pattern;
pub mod rng;
pub mod stats;
pub mod theory;
pub mod ystat;

pub use error::{Error, Result};
pub use graph::Hypergraph;
pub use params::{derive_constants, CycleShape, Params};
pub use rng::Seed;
