//! Command-line front end for `ntic-core`: curves, per-trajectory tables,
//! the divergence witness and the conformance grid.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
