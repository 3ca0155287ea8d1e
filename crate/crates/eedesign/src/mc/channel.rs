//! Rayleigh block-fading channels and their uplink LMMSE estimates.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};

pub type CMatrix = DMatrix<Complex64>;

/// One channel draw: column `k` holds the `M` antenna gains of user `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: CMatrix,
    pub variances: Vec<f64>,
}

/// Sample of `CN(0, variance)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (0.5 * variance).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * scale, im * scale)
}

/// Draws `H` with i.i.d. `CN(0, variances[k])` entries in column `k`,
/// filled column by column.
pub fn draw_channel<R: Rng + ?Sized>(m: usize, k: usize, variances: &[f64], rng: &mut R) -> Result<ChannelRealization> {
    if m == 0 || k == 0 {
        return Err(invalid("channel needs M >= 1 and K >= 1"));
    }
    if variances.len() != k {
        return Err(invalid(format!("expected {k} user variances, got {}", variances.len())));
    }
    if variances.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(invalid("user variances must be > 0"));
    }
    let mut h = CMatrix::zeros(m, k);
    for (col, &var) in variances.iter().enumerate() {
        for row in 0..m {
            h[(row, col)] = complex_gaussian(rng, var);
        }
    }
    Ok(ChannelRealization { h, variances: variances.to_vec() })
}

/// Per-entry LMMSE estimate of `H` from orthogonal uplink pilots.
///
/// `pilot_snr` is the pilot energy received per user divided by the noise
/// variance, so the observation of an entry `h` of variance `lambda` is
/// `sqrt(pilot_snr) h + n` with `n ~ CN(0, 1)`. The estimation error has
/// variance `lambda / (lambda pilot_snr + 1)` and is uncorrelated with the
/// estimate.
pub fn mmse_estimate<R: Rng + ?Sized>(channel: &ChannelRealization, pilot_snr: f64, rng: &mut R) -> Result<CMatrix> {
    if !(pilot_snr > 0.0) {
        return Err(invalid("pilot SNR must be > 0"));
    }
    let root = pilot_snr.sqrt();
    let mut estimate = channel.h.clone();
    for (col, &var) in channel.variances.iter().enumerate() {
        let gain = var * root / (var * pilot_snr + 1.0);
        for row in 0..channel.h.nrows() {
            let observed = channel.h[(row, col)] * root + complex_gaussian(rng, 1.0);
            estimate[(row, col)] = observed * gain;
        }
    }
    Ok(estimate)
}
