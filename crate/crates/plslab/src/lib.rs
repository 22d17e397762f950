//! Physical-layer security laboratory.
//!
//! The crate provides the building blocks for wireless secrecy experiments:
//!
//! - [`channel`]: Rayleigh fading draws, reciprocal probe pairs and a
//!   log-distance RSS model;
//! - [`secrecy`]: Gaussian broadcast secrecy regions, static and ergodic;
//! - [`fblen`]: finite-blocklength normal approximations, with and without a
//!   leakage budget;
//! - [`skg`]: a full secret-key-generation pipeline — quantisation,
//!   syndrome reconciliation, privacy amplification — plus a hybrid
//!   key-then-encrypt messaging layer;
//! - [`scheduler`]: pilot/data subcarrier assignment balancing key renewal
//!   against data throughput, with exact, heuristic, and brute-force solvers,
//!   and delay-constrained effective-capacity allocation;
//! - [`adversary`]: an injection attack on channel-reciprocity key agreement
//!   and the probing countermeasure that defeats it, plus a
//!   sensing-threshold jamming game;
//! - [`auth`]: fingerprint-based challenge–response authentication,
//!   RSS-based proximity verification, and key-evolving session resumption.
//!
//! All randomness flows through [`rng::Rng`], a counter-mode generator that
//! is fully reproducible from a `(seed, stream)` pair, so every experiment
//! in the companion CLI can be replayed bit for bit.

pub mod adversary;
pub mod auth;
pub mod channel;
pub mod error;
pub mod fblen;
pub mod rng;
pub mod scheduler;
pub mod secrecy;
pub mod skg;

pub use error::{Error, Result};
pub use num_complex::Complex64;
