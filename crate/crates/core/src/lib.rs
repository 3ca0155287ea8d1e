//! Energy-efficient design of multi-user MIMO downlinks.
//!
//! Given a hardware power model and a propagation environment, this crate
//! finds the number of BS antennas `M`, number of served users `K` and
//! normalised transmit power `rho` that maximise bits per Joule under
//! zero-forcing precoding, either jointly by exhaustive search or by
//! alternating the closed-form single-variable optima.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod design;
pub mod ee;
pub mod error;
pub mod lambert;
pub mod power;
pub mod propagation;


pub use design::{AlternatingTrace, SearchSpace};
pub use ee::DesignPoint;
pub use error::{Error, Result};
pub use power::{HardwareProfile, PowerCoefficients, Precoding};
pub use propagation::PropagationModel;
