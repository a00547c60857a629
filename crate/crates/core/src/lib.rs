//! Sampling toolkit for discrete pairwise graphical models (Ising models
//! foremost): sequential Gibbs sampling, two asynchronous HOGWILD!-Gibbs
//! execution engines (a deterministic simulated stale-read engine and a
//! real lock-free multi-threaded one), a greedy-coupling harness measuring
//! Hamming-distance moments between the samplers, and estimators with
//! closed-form bound calculators for the bias and variance of polynomial
//! statistics computed from asynchronous samples.
//!
//! Everything that draws randomness is seeded through [`rng::RngStream`],
//! so simulated experiments replay bit-identically; only the hardware
//! engine is scheduling-dependent.
//!
//! ```
//! use hogwild_gibbs::model::IsingModel;
//! use hogwild_gibbs::rng::RngStream;
//! use hogwild_gibbs::sampler::{mixing_budget_experiment, sample_batch};
//!
//! let model = IsingModel::curie_weiss(50, 0.5).unwrap();
//! assert!(model.dobrushin_alpha().unwrap() < 0.5);
//! let samples = sample_batch(
//!     &model,
//!     32,
//!     mixing_budget_experiment(50),
//!     RngStream::new(42, 0),
//! );
//! assert_eq!(samples.len(), 32);
//! ```

pub mod coupling;
pub mod error;
pub mod hogwild;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
