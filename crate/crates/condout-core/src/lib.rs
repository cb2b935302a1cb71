//! Conditional outlier detection for multi-label data.
//!
//! The crate detects instances whose binary response vector `y` is improbable
//! given its feature context `x`. A dependent-binary-relevance model (one
//! L2-regularized logistic CPD per label, conditioned on the features plus all
//! sibling labels) maps each instance to a vector of per-label conditional
//! probabilities. Outlier scores are then computed in that probability space:
//! complementary probability, robust (minimum covariance determinant)
//! distance, L_r norms, local outlier factor, and a one-class SVM, alongside
//! joint-space baselines over concatenated `[x ; y]` vectors.
//!
//! The crate is `no_std`-compatible (requires `alloc`); everything here is
//! pure computation over in-memory matrices. File formats, persistence, and
//! the experiment harness live in the companion `condout` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dataset;
pub mod dbr;
pub mod error;
pub mod eval;
pub mod inject;
pub mod linalg;
pub mod logistic;
pub mod lof;
pub(crate) mod math;
pub mod matrix;
pub mod mcd;
pub mod ocsvm;
pub mod rng;
pub mod scoring;
pub(crate) mod special;

pub use error::{Error, Result};

/// Probabilities produced anywhere in the crate are clipped into
/// `[PROB_CLIP, 1 - PROB_CLIP]` so that logs and complements never see an
/// exact 0 or 1.
pub const PROB_CLIP: f64 = 1e-6;
