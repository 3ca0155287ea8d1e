//! Circuit power model.
//!
//! Total consumed energy per channel use is
//! `tx / eta + sum_i C[i][0] K^i + sum_i C[i][1] K^i M`, where the first sum
//! collects costs that do not scale with the antenna count and the second the
//! per-antenna costs. All energies are in Joule per channel use (J/c.u.).

use alloc::format;


#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};

/// Physical hardware description. Powers are in Watt, times in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardwareProfile {
    /// Fixed architecture power (control signalling, backhaul, baseband idle).
    pub static_power_w: f64,
    /// Local oscillator shared by all BS antennas.
    pub synthesizer_w: f64,
    pub coding_w: f64,
    pub decoding_w: f64,
    /// Power of the BS components attached to each antenna.
    pub tx_chain_w: f64,
    /// Power of each single-antenna UE receiver.
    pub rx_chain_w: f64,
    /// Computational efficiency at the BS, operations per Joule.
    pub ops_per_joule: f64,
    /// Symbol time, seconds per channel use. Converts W to J/c.u.
    pub symbol_time_s: f64,
    pub coherence_bandwidth_hz: f64,
    pub coherence_time_s: f64,
    /// Power amplifier efficiency in (0, 1].
    pub eta: f64,
}

impl Default for HardwareProfile {
    /// Macro-cell reference hardware.
    fn default() -> Self {
        Self {
            static_power_w: 2.0,
            synthesizer_w: 2.0,
            coding_w: 4.0,
            decoding_w: 0.5,
            tx_chain_w: 1.0,
            rx_chain_w: 0.3,
            ops_per_joule: 1e9,
            symbol_time_s: 1.0 / 9e6,
            coherence_bandwidth_hz: 180e3,
            coherence_time_s: 32e-3,
            eta: 0.3,
        }
    }
}

impl HardwareProfile {
    pub fn validate(&self) -> Result<()> {
        let powers = [
            ("static_power_w", self.static_power_w),
            ("synthesizer_w", self.synthesizer_w),
            ("coding_w", self.coding_w),
            ("decoding_w", self.decoding_w),
            ("tx_chain_w", self.tx_chain_w),
            ("rx_chain_w", self.rx_chain_w),
        ];
        for (name, p) in powers {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(invalid(format!("{name} must be a finite power >= 0, got {p}")));
            }
        }
        if !(self.ops_per_joule > 0.0) {
            return Err(invalid("ops_per_joule must be > 0"));
        }
        if !(self.symbol_time_s > 0.0 && self.symbol_time_s.is_finite()) {
            return Err(invalid("symbol_time_s must be > 0"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(invalid("eta must be in (0,1]"));
        }
        if !(self.coherence_time_s * self.coherence_bandwidth_hz >= 1.0) {
            return Err(invalid(
                "coherence_time_s * coherence_bandwidth_hz must be at least one channel use",
            ));
        }
        Ok(())
    }

    /// Channel uses per coherence block, `T = round(T_coh * B)`.
    pub fn coherence_block_length(&self) -> Result<u32> {
        let uses = self.coherence_time_s * self.coherence_bandwidth_hz;
        if !(uses >= 1.0 && uses.is_finite()) {
            return Err(invalid(
                "coherence_time_s * coherence_bandwidth_hz must be at least one channel use",
            ));
        }
        let t = uses.round();
        if t < 2.0 || t > f64::from(u32::MAX) {
            return Err(invalid(format!(
                "coherence block of {t} channel uses leaves no room for data after the pilots"
            )));
        }
        Ok(t as u32)
    }

    /// Coefficients of the power polynomial for ZF-type precoding.
    pub fn coefficients(&self) -> Result<PowerCoefficients> {
        self.validate()?;
        let t = self.coherence_block_length()?;
        self.coefficients_with_block(t)
    }

    /// As [`coefficients`](Self::coefficients) but with an explicit
    /// coherence block length instead of `round(T_coh * B)`.
    pub fn coefficients_with_block(&self, t: u32) -> Result<PowerCoefficients> {
        self.validate()?;
        if t < 2 {
            return Err(invalid("coherence block must hold at least 2 channel uses"));
        }
        let s = self.symbol_time_s;
        let l = self.ops_per_joule;
        let lt = l * f64::from(t);
        PowerCoefficients::new(
            [
                (self.static_power_w + self.synthesizer_w) * s,
                (self.coding_w + self.decoding_w + self.rx_chain_w) * s,
                0.0,
                2.0 / (3.0 * lt),
            ],
            [self.tx_chain_w * s, (3.0 + f64::from(t)) / lt, 2.0 / lt],
            self.eta,
            t,
        )
    }

    /// Coefficients for the given precoder family and block length `t`.
    ///
    /// MRT only normalises the `K` channel vectors, so the inversion terms
    /// vanish and the data-transmission cost `(1 - K/T) M K / L` leaves a
    /// negative `K^2 M` coefficient.
    pub fn coefficients_for(&self, precoding: Precoding, t: u32) -> Result<PowerCoefficients> {
        match precoding {
            Precoding::ZeroForcing => self.coefficients_with_block(t),
            Precoding::MaximumRatio => {
                let zf = self.coefficients_with_block(t)?;
                let lt = self.ops_per_joule * f64::from(t);
                let fixed = zf.fixed;
                PowerCoefficients::new_signed(
                    [fixed[0], fixed[1], 0.0, 0.0],
                    [zf.per_antenna[0], (3.0 + f64::from(t)) / lt, -1.0 / lt],
                    self.eta,
                    t,
                )
            }
        }
    }
}

/// Precoder family whose computational cost enters the circuit power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precoding {
    /// ZF and RZF: LU-based inversion of the `K x K` Gram matrix.
    ZeroForcing,
    /// MRT: normalisation of the channel vectors only.
    MaximumRatio,
}

/// Coefficients of the consumed-power polynomial.
///
/// `fixed[i]` multiplies `K^i`, `per_antenna[i]` multiplies `K^i M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCoefficients {
    fixed: [f64; 4],
    per_antenna: [f64; 3],
    eta: f64,
    coherence_block: u32,
}

impl PowerCoefficients {
    pub fn new(fixed: [f64; 4], per_antenna: [f64; 3], eta: f64, coherence_block: u32) -> Result<Self> {
        if fixed.iter().chain(&per_antenna).any(|c| !(*c >= 0.0 && c.is_finite())) {
            return Err(invalid("power coefficients must be finite and >= 0"));
        }
        if fixed.iter().chain(&per_antenna).all(|&c| c == 0.0) {
            return Err(invalid(
                "at least one power coefficient must be positive for a finite optimum",
            ));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid("eta must be in (0,1]"));
        }
        if coherence_block < 2 {
            return Err(invalid("coherence block must hold at least 2 channel uses"));
        }
        Ok(Self { fixed, per_antenna, eta, coherence_block })
    }

    /// Admits negative coefficients as long as both circuit sums stay
    /// `>= 0` for every integer `0 <= K <= T`. The closed-form optimizers
    /// reject such coefficient sets.
    pub fn new_signed(fixed: [f64; 4], per_antenna: [f64; 3], eta: f64, coherence_block: u32) -> Result<Self> {
        if fixed.iter().chain(&per_antenna).any(|c| !c.is_finite()) {
            return Err(invalid("power coefficients must be finite"));
        }
        let magnitude = |c: f64| if c < 0.0 { 0.0 } else { c };
        let clipped = Self::new(fixed.map(magnitude), per_antenna.map(magnitude), eta, coherence_block)?;
        let c = Self { fixed, per_antenna, ..clipped };
        if (0..=coherence_block).any(|k| c.fixed_sum(f64::from(k)) < 0.0 || c.per_antenna_sum(f64::from(k)) < 0.0) {
            return Err(invalid("circuit power must be >= 0 for every K up to T"));
        }
        Ok(c)
    }

    /// All coefficients are `>= 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.fixed.iter().chain(&self.per_antenna).all(|&c| c >= 0.0)
    }

    /// Same as [`new`](Self::new) but admits an all-zero coefficient set,
    /// which describes an amplifier-only power budget.
    pub fn amplifier_only(eta: f64, coherence_block: u32) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid("eta must be in (0,1]"));
        }
        if coherence_block < 2 {
            return Err(invalid("coherence block must hold at least 2 channel uses"));
        }
        Ok(Self { fixed: [0.0; 4], per_antenna: [0.0; 3], eta, coherence_block })
    }

    pub fn fixed(&self) -> &[f64; 4] {
        &self.fixed
    }

    pub fn per_antenna(&self) -> &[f64; 3] {
        &self.per_antenna
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Coherence block length `T` in channel uses.
    pub fn coherence_block(&self) -> u32 {
        self.coherence_block
    }

    pub fn with_fixed(mut self, fixed: [f64; 4]) -> Result<Self> {
        self.fixed = fixed;
        Self::new(self.fixed, self.per_antenna, self.eta, self.coherence_block)
    }

    pub fn with_per_antenna(mut self, per_antenna: [f64; 3]) -> Result<Self> {
        self.per_antenna = per_antenna;
        Self::new(self.fixed, self.per_antenna, self.eta, self.coherence_block)
    }

    /// `sum_i C[i][0] K^i`.
    pub fn fixed_sum(&self, k: f64) -> f64 {
        self.fixed.iter().rev().fold(0.0, |acc, &c| acc * k + c)
    }

    /// `sum_i C[i][1] K^i`, the cost of one extra antenna.
    pub fn per_antenna_sum(&self, k: f64) -> f64 {
        self.per_antenna.iter().rev().fold(0.0, |acc, &c| acc * k + c)
    }

    /// Circuit energy at real-valued `(M, K)`.
    pub fn circuit(&self, m: f64, k: f64) -> f64 {
        self.fixed_sum(k) + self.per_antenna_sum(k) * m
    }

    /// Total consumed energy per channel use.
    pub fn total_power(&self, m: u32, k: u32, tx_energy: f64) -> Result<f64> {
        if m < k {
            return Err(Error::Dimension { m, k });
        }
        if !(tx_energy >= 0.0) {
            return Err(invalid("transmit energy must be >= 0"));
        }
        Ok(tx_energy / self.eta + self.circuit(f64::from(m), f64::from(k)))
    }
}
