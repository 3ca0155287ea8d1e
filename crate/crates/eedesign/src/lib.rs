//! Simulation and tooling around `eedesign-core`.
//!
//! * [`mc`]: Monte Carlo link-level simulator for ZF, RZF and MRT.
//! * [`config`]: scenario files.
//! * [`output`]: versioned CSV tables.
//! * [`cli`]: the `eedesign` command line.
//! * [`sweep`]: best design per antenna count for each precoder.

pub mod cli;
pub mod config;
pub mod error;
pub mod mc;
pub mod output;
pub mod sweep;

pub use error::{Result, SimError};
