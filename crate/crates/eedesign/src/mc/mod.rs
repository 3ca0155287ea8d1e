//! Monte Carlo link-level simulation.
//!
//! Users are dropped at random, their channels drawn from Rayleigh block
//! fading and precoded with ZF, RZF or MRT built from either the true or an
//! LMMSE-estimated channel. The per-user rate is the average of
//! `(1 - K/T) log2(1 + SINR)` over channel realisations.
//!
//! All schemes are driven by the same normalised power `rho`: ZF radiates
//! `rho sigma2 (M - K) tr((H^H H)^-1)` per realisation, RZF and MRT
//! radiate exactly `rho K A_lambda`, which is the ZF average.
//!
//! Trial `i` uses the ChaCha8 stream `i` of the configured seed and the
//! per-trial results are summed in trial order, so every estimate is
//! reproducible bit for bit whatever the thread count.

pub mod channel;
pub mod precoder;
mod simulator;

use std::fmt;
use std::str::FromStr;

use eedesign_core::{HardwareProfile, PowerCoefficients, Precoding};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use channel::{draw_channel, mmse_estimate, CMatrix, ChannelRealization};
pub use precoder::{default_regularization, precode_mrt, precode_rzf, precode_zf, sinr};
pub use simulator::{average_rates, ee_mc, optimize_rho_mc, LinkSimulator, McEstimate, RhoSearch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Zf,
    Rzf,
    Mrt,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Zf => "zf",
            Scheme::Rzf => "rzf",
            Scheme::Mrt => "mrt",
        }
    }
}

impl Scheme {
    /// Family whose computational cost the circuit power accounts for.
    pub fn precoding(self) -> Precoding {
        match self {
            Scheme::Zf | Scheme::Rzf => Precoding::ZeroForcing,
            Scheme::Mrt => Precoding::MaximumRatio,
        }
    }
}

/// Circuit-power coefficients of each precoder family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitModel {
    pub zero_forcing: PowerCoefficients,
    pub maximum_ratio: PowerCoefficients,
}

impl CircuitModel {
    pub fn from_hardware(hardware: &HardwareProfile, coherence_block: u32) -> eedesign_core::Result<Self> {
        Ok(Self {
            zero_forcing: hardware.coefficients_for(Precoding::ZeroForcing, coherence_block)?,
            maximum_ratio: hardware.coefficients_for(Precoding::MaximumRatio, coherence_block)?,
        })
    }

    /// Same coefficients for every scheme.
    pub fn uniform(coeffs: PowerCoefficients) -> Self {
        Self { zero_forcing: coeffs, maximum_ratio: coeffs }
    }

    pub fn for_scheme(&self, scheme: Scheme) -> &PowerCoefficients {
        match scheme.precoding() {
            Precoding::ZeroForcing => &self.zero_forcing,
            Precoding::MaximumRatio => &self.maximum_ratio,
        }
    }

    pub fn coherence_block(&self) -> u32 {
        self.zero_forcing.coherence_block()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Csi {
    Perfect,
    Estimated,
}

impl Csi {
    pub fn name(self) -> &'static str {
        match self {
            Csi::Perfect => "perfect",
            Csi::Estimated => "estimated",
        }
    }
}

/// Uplink pilot energy per pilot symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PilotEnergy {
    /// Same as the downlink energy per user, `rho A_lambda`.
    MatchDownlink,
    /// Fixed energy in J/c.u.
    PerSymbol(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecoderSpec {
    pub scheme: Scheme,
    pub csi: Csi,
    pub pilot_energy: PilotEnergy,
    /// RZF regularisation; `None` selects `K sigma2 / budget`.
    pub regularization: Option<f64>,
}

impl PrecoderSpec {
    pub fn new(scheme: Scheme, csi: Csi) -> Self {
        Self { scheme, csi, pilot_energy: PilotEnergy::MatchDownlink, regularization: None }
    }

    pub fn perfect(scheme: Scheme) -> Self {
        Self::new(scheme, Csi::Perfect)
    }

    /// `zf`, `rzf`, `mrt`, with an `-est` suffix for estimated CSI.
    pub fn label(&self) -> String {
        match self.csi {
            Csi::Perfect => self.scheme.name().to_string(),
            Csi::Estimated => format!("{}-est", self.scheme.name()),
        }
    }
}

impl fmt::Display for PrecoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PrecoderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (base, csi) = match s.trim().to_ascii_lowercase().strip_suffix("-est") {
            Some(base) => (base.to_string(), Csi::Estimated),
            None => (s.trim().to_ascii_lowercase(), Csi::Perfect),
        };
        let scheme = match base.as_str() {
            "zf" => Scheme::Zf,
            "rzf" => Scheme::Rzf,
            "mrt" => Scheme::Mrt,
            _ => return Err(format!("unknown precoder '{s}' (expected zf, rzf or mrt, optionally with -est)")),
        };
        Ok(Self::new(scheme, csi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u32,
    pub seed: u64,
    /// Draw new user positions in every trial instead of once per run.
    pub resample_users: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { trials: 1000, seed: 0, resample_users: true }
    }
}

/// Random stream of trial `stream` under `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream holding the user drop shared by all trials when users are not
/// resampled.
pub(crate) const SHARED_DROP_STREAM: u64 = u64::MAX;

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
