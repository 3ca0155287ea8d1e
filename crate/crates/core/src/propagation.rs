//! User distribution and path loss.
//!
//! The only statistic the closed-form design needs is
//! `A_lambda = E{sigma^2 / lambda}`, the expected inverse channel gain scaled
//! by the noise variance. The simulator additionally draws per-user
//! variances `lambda` from the same distribution.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Users uniformly distributed over an annulus around the BS, with
/// `lambda = attenuation / d^pathloss_exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusCell {
    /// Channel attenuation at unit distance (dimensionless).
    pub attenuation: f64,
    pub pathloss_exponent: f64,
    pub d_min: f64,
    pub d_max: f64,
}

impl Default for AnnulusCell {
    fn default() -> Self {
        Self { attenuation: 10f64.powf(-3.53), pathloss_exponent: 3.76, d_min: 35.0, d_max: 250.0 }
    }
}

impl AnnulusCell {
    pub fn validate(&self) -> Result<()> {
        if !(self.attenuation > 0.0 && self.attenuation.is_finite()) {
            return Err(invalid("attenuation must be > 0"));
        }
        if !(self.pathloss_exponent > 0.0 && self.pathloss_exponent.is_finite()) {
            return Err(invalid("pathloss_exponent must be > 0"));
        }
        if !(self.d_min > 0.0 && self.d_min < self.d_max && self.d_max.is_finite()) {
            return Err(invalid("cell radii must satisfy 0 < d_min < d_max"));
        }
        Ok(())
    }

    /// `E{1/lambda}` for area-uniform users.
    fn mean_inverse_gain(&self) -> f64 {
        let k = self.pathloss_exponent;
        let (lo, hi) = (self.d_min, self.d_max);
        (hi.powf(k + 2.0) - lo.powf(k + 2.0))
            / ((hi * hi - lo * lo) * self.attenuation * (1.0 + 0.5 * k))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let (lo2, hi2) = (self.d_min * self.d_min, self.d_max * self.d_max);
        let d = (lo2 + u * (hi2 - lo2)).sqrt();
        self.attenuation / d.powf(self.pathloss_exponent)
    }
}

/// Tabulated pdf of the channel variance, linearly interpolated between
/// the tabulated points and zero outside them.
///
/// A single-row table is a point mass at that abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPdf {
    x: Vec<f64>,
    density: Vec<f64>,
    /// Cumulative probability at each abscissa, unnormalised.
    cdf: Vec<f64>,
}

/// Tolerance on the total mass of a tabulated pdf.
pub const PDF_MASS_TOLERANCE: f64 = 1e-6;

impl EmpiricalPdf {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("empirical pdf needs at least one point"));
        }
        let x: Vec<f64> = points.iter().map(|p| p.0).collect();
        let density: Vec<f64> = points.iter().map(|p| p.1).collect();
        if x.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("empirical pdf abscissae must be finite and >= 0"));
        }
        if density.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("empirical pdf densities must be finite and >= 0"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("empirical pdf abscissae must be strictly increasing"));
        }
        if x.len() == 1 {
            if x[0] <= 0.0 {
                return Err(invalid("point mass must sit at a positive channel variance"));
            }
            return Ok(Self { x, density, cdf: Vec::from([1.0]) });
        }
        let mut cdf = Vec::with_capacity(x.len());
        cdf.push(0.0);
        for i in 1..x.len() {
            let mass = 0.5 * (density[i] + density[i - 1]) * (x[i] - x[i - 1]);
            cdf.push(cdf[i - 1] + mass);
        }
        let total = cdf[cdf.len() - 1];
        if (total - 1.0).abs() > PDF_MASS_TOLERANCE {
            return Err(invalid(alloc::format!(
                "empirical pdf integrates to {total}, expected 1 within {PDF_MASS_TOLERANCE}"
            )));
        }
        Ok(Self { x, density, cdf })
    }

    pub fn is_point_mass(&self) -> bool {
        self.x.len() == 1
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.density.iter().copied())
    }

    /// `E{1/lambda}`, integrated exactly over each linear segment.
    fn mean_inverse_gain(&self) -> Result<f64> {
        if self.is_point_mass() {
            return Ok(1.0 / self.x[0]);
        }
        let mut acc = 0.0;
        for i in 1..self.x.len() {
            let (x0, x1) = (self.x[i - 1], self.x[i]);
            let (f0, f1) = (self.density[i - 1], self.density[i]);
            let slope = (f1 - f0) / (x1 - x0);
            if x0 == 0.0 {
                if f0 > 0.0 {
                    return Err(Error::Divergent("pdf has positive density at zero channel gain"));
                }
                acc += slope * x1;
            } else {
                // f(x) = f0 + slope (x - x0)  =>  int f/x = (f0 - slope x0) ln(x1/x0) + slope (x1 - x0)
                acc += (f0 - slope * x0) * ((x1 - x0) / x0).ln_1p() + slope * (x1 - x0);
            }
        }
        Ok(acc / self.cdf[self.cdf.len() - 1])
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.is_point_mass() {
            return self.x[0];
        }
        let total = self.cdf[self.cdf.len() - 1];
        let target = rng.random::<f64>() * total;
        let i = self.cdf.partition_point(|&c| c <= target).clamp(1, self.x.len() - 1);
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let f0 = self.density[i - 1];
        let slope = (self.density[i] - f0) / (x1 - x0);
        let r = target - self.cdf[i - 1];
        // solve f0 t + slope t^2 / 2 = r for the offset t
        let disc = (f0 * f0 + 2.0 * slope * r).max(0.0);
        let denom = f0 + disc.sqrt();
        let t = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
        (x0 + t).clamp(x0, x1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UserDistribution {
    Annulus(AnnulusCell),
    Empirical(EmpiricalPdf),
}

/// Propagation environment: user distribution plus noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationModel {
    pub users: UserDistribution,
    /// Noise variance in J/c.u.
    pub noise_variance: f64,
}

impl Default for PropagationModel {
    fn default() -> Self {
        Self { users: UserDistribution::Annulus(AnnulusCell::default()), noise_variance: 1e-20 }
    }
}

impl PropagationModel {
    pub fn annulus(cell: AnnulusCell, noise_variance: f64) -> Result<Self> {
        let model = Self { users: UserDistribution::Annulus(cell), noise_variance };
        model.validate()?;
        Ok(model)
    }

    pub fn empirical(pdf: EmpiricalPdf, noise_variance: f64) -> Result<Self> {
        let model = Self { users: UserDistribution::Empirical(pdf), noise_variance };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_variance > 0.0 && self.noise_variance.is_finite()) {
            return Err(invalid("noise variance must be > 0"));
        }
        match &self.users {
            UserDistribution::Annulus(cell) => cell.validate(),
            UserDistribution::Empirical(_) => Ok(()),
        }
    }

    /// `A_lambda = E{sigma^2 / lambda}`.
    pub fn a_lambda(&self) -> Result<f64> {
        self.validate()?;
        let mean = match &self.users {
            UserDistribution::Annulus(cell) => cell.mean_inverse_gain(),
            UserDistribution::Empirical(pdf) => pdf.mean_inverse_gain()?,
        };
        Ok(self.noise_variance * mean)
    }

    /// Draws the channel variance of one randomly located user.
    pub fn sample_user_variance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.users {
            UserDistribution::Annulus(cell) => cell.sample(rng),
            UserDistribution::Empirical(pdf) => pdf.sample(rng),
        }
    }
}
