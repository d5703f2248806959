//! Core algorithms for a class-imbalance-aware image classification pipeline.
//!
//! This crate holds the pure, deterministic part of the toolkit:
//!
//! - [`image`]: pixel-level transforms (flips, affine warps, brightness,
//!   Gaussian blur, additive Gaussian noise) on normalized `[0, 1]` images
//! - [`augment`]: augmentation policies (three standard levels plus an
//!   intensive regime) and their realization as sampled transform parameters
//! - [`manifest`]: image catalogs with label/split assignments and a
//!   deterministic stratified splitter
//! - [`rebalance`]: below-mean class selection and per-class augmentation
//!   targets
//! - [`nn`]: a small exactly-differentiated convolutional classifier and the
//!   compound-scaling calculator
//! - [`train`]: cost-sensitive weighted loss, Adam, the training loop, and
//!   binary-to-multi-class transfer staging
//! - [`metrics`]: confusion matrices and per-class precision/recall/F1
//!
//! Everything here is `no_std` (with `alloc`). File formats, dataset
//! scanning, and the command line live in the companion `imbf-cli` crate.
//!
//! Determinism is a design contract: every source of randomness is seeded,
//! the generators and variate algorithms are frozen (see [`rng`]), and all
//! reductions run in a fixed order, so identical inputs produce bit-identical
//! outputs on every platform.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod augment;
pub mod image;
pub mod label;
pub mod manifest;
pub mod metrics;
pub mod nn;
pub mod rebalance;
pub mod rng;
pub mod train;
