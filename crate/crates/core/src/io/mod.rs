//! Flat-file formats: CSV tables, single-record result files, SVG plots and
//! the run configuration.

pub mod config;
pub mod csv;
pub mod svg;

pub use config::{derive_seed, RunConfig};
