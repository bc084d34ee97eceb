//! Library side of the experiment runner: configuration, the experiment
//! registry, result tables, and output emission. The `qmoments` binary is a
//! thin argument-parsing wrapper around these.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod svg;
pub mod table;
