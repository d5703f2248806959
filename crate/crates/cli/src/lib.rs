//! IO, file formats, dataset scanning, training drivers, and the command
//! line for the class-imbalance-aware classification pipeline.
//!
//! The pure algorithms live in `imbf-core`; this crate adds everything that
//! touches the filesystem: directory scanning into manifests, the CSV
//! manifest format, PNG/PPM image IO, the binary checkpoint format, JSON
//! plans and reports, parallel materialization of augmented copies, and the
//! `imbf` binary's subcommands.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod io;
pub mod materialize;
pub mod trainer;

pub use error::PipelineError;
