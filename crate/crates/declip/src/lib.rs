//! Pilotless recovery of clipped OFDM signals by compressive sensing over
//! reliable data carriers.
//!
//! The transmitter clips the time-domain OFDM signal at a magnitude
//! threshold, which adds a temporally sparse distortion. Instead of
//! reserving tones, the receiver ranks every data tone by how reliably its
//! post-equalization deviation measures that distortion, senses over the
//! best `m` tones, and recovers the clip signal in one shot by weighted
//! phase-augmented LASSO or Bayesian matching pursuit. Classical iterative
//! receivers (ItML, DAR, Quasi-ML) are included for comparison, along with
//! a deterministic Monte Carlo harness that produces SER-vs-m tables.
//!
//! See the `examples/` directory for a runnable tour of each stage, and the
//! `declip` binary for the experiment CLI.

pub mod baselines;
pub mod channel;
pub mod constellation;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod ofdm;
pub mod recovery;
pub mod reliability;

pub use error::{Error, Result};
