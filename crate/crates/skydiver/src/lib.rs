//! Skydiver: a deterministic simulator for convolutional spiking neural
//! networks running on an event-driven SPE-cluster accelerator model.
//!
//! The crate covers four pieces:
//! - [`snn`]: integrate-and-fire dynamics, spike-triggered convolution,
//!   network forward passes, and rate encoding;
//! - [`aprc`]: the full-padding/stride-1 transform that makes per-channel
//!   membrane-update sums exactly, and spike counts approximately,
//!   proportional to filter magnitudes;
//! - [`cbws`]: the channel-balanced workload scheduling heuristic (plus
//!   an exact branch-and-bound oracle);
//! - [`sim`]: cycle accounting per SPE under a channel partition, with
//!   balance-ratio and throughput estimates.
//!
//! [`io`] holds the file formats and [`cli`] the batch pipelines behind
//! the `skydiver` binary. See the crate examples for runnable tours of
//! each capability.

pub mod aprc;
pub mod cbws;
pub mod cli;
pub mod error;
pub mod io;
pub mod sim;
pub mod snn;

pub use error::{Error, Result};
