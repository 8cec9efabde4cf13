//! Simulation engine for error-conditioned sequential sampling of
//! negative-binomial count classifiers.
//!
//! The crate models two-class RNA-Seq-style count data where each gene's
//! read count follows a negative binomial with a gene-specific dispersion
//! shared across classes and a class-specific success probability. On top
//! of that model it provides:
//!
//! - [`dist`]: samplers and log-mass functions for the primitive
//!   distributions (gamma, beta, negative binomial, table counts),
//! - [`model`]: ground-truth parameter draws and synthetic data generation,
//! - [`gibbs`]: posterior inference via closed-form conditional updates with
//!   latent table augmentation,
//! - [`obc`]: the posterior-averaged classifier and its empirical error,
//! - [`sampler`]: the error-conditioned rule for choosing which class to
//!   sample next,
//! - [`harness`]: the paired random-vs-controlled experiment protocol with
//!   CSV output and SVG plotting.
//!
//! All randomness flows through [`rng::RngStream`], a labeled-derivation
//! scheme that makes every run reproducible from a single master seed and
//! independent of thread scheduling.

pub mod dist;
pub mod error;
pub mod gibbs;
pub mod harness;
pub mod model;
pub mod obc;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
