#![no_std]

//! Macro-factor house price modelling.
//!
//! The crate is split along the pipeline:
//!
//! - [`data`]: quarters, series alignment, gap filling, rate transforms, model specs
//!   and per-country dataset assembly.
//! - [`metrics`]: residual statistics (RMS, SD, MAE, MAPE, chi-squared pair) and the
//!   ensemble statistics row.
//! - [`models`]: kNN regression, bagged regression trees, repeated cross-validation,
//!   variable importance and seeded ensembles.
//! - [`diagnostics`]: permutation test, augmented Dickey-Fuller test and the
//!   last-four-quarters hold-out evaluation.
//! - [`scenario`]: full-factorial scenario grids pushed through a trained model.
//! - [`baselines`]: VAR, no-intercept least squares, Gaussian GLM and the method
//!   comparison table.
//!
//! Everything here is pure computation over in-memory values; file formats and the
//! command-line front-end live in the companion `hpi` crate.

extern crate alloc;

pub mod baselines;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod models;
pub mod rng;
pub mod scenario;
pub mod special;

pub use error::{Error, Result};
