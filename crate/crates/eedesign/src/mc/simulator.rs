//! Monte Carlo estimates of rates, transmit energy and energy efficiency.

use std::f64::consts::LN_2;

use eedesign_core::{PowerCoefficients, PropagationModel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::channel::{draw_channel, mmse_estimate, CMatrix, ChannelRealization};
use super::precoder::{default_regularization, precode_mrt, precode_rzf, precode_zf, sinr};
use super::{compensated_sum, trial_rng, Csi, McConfig, PilotEnergy, PrecoderSpec, Scheme, SHARED_DROP_STREAM};
use crate::error::{invalid, Result, SimError};

/// Decades of `rho` scanned before the golden-section refinement.
const RHO_GRID: (f64, f64) = (-3.0, 5.0);
const RHO_GRID_STEP: f64 = 0.25;
/// Final bracket width in `ln rho`, i.e. 1% relative.
const RHO_TOLERANCE: f64 = 0.00995;

/// Sufficient statistics of one perfect-CSI trial for evaluating any `rho`.
enum TrialData {
    Zf { inverse_trace: f64 },
    /// Gram eigenvalues and `|U[k][i]|^2`, row `k` at `k * K`.
    Rzf { eigenvalues: Vec<f64>, weights: Vec<f64> },
    /// `|h_k|^2` and `sum_{l != k} |h_k^H h_l|^2 / |h_l|^2`.
    Mrt { gain: Vec<f64>, interference: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Average rate per user in bit/c.u., pilot overhead included.
    pub rate_per_ue: f64,
    pub rate_std_error: f64,
    /// Average radiated energy in J/c.u.
    pub tx_energy: f64,
    pub tx_std_error: f64,
    pub trials: u32,
}

impl McEstimate {
    pub fn sum_rate(&self, k: u32) -> f64 {
        f64::from(k) * self.rate_per_ue
    }

    pub fn total_power(&self, m: u32, k: u32, coeffs: &PowerCoefficients) -> Result<f64> {
        Ok(coeffs.total_power(m, k, self.tx_energy)?)
    }

    /// Sum rate over total consumed energy, bit/Joule.
    pub fn ee(&self, m: u32, k: u32, coeffs: &PowerCoefficients) -> Result<f64> {
        Ok(self.sum_rate(k) / self.total_power(m, k, coeffs)?)
    }

    /// Relative MC uncertainty of the energy efficiency, from the rate and
    /// transmit energy standard errors.
    pub fn relative_noise(&self) -> f64 {
        let rel = |se: f64, mean: f64| if mean > 0.0 { se / mean } else { 0.0 };
        rel(self.rate_std_error, self.rate_per_ue) + rel(self.tx_std_error, self.tx_energy)
    }
}

/// Outcome of the scalar EE maximisation over `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSearch {
    pub rho: f64,
    pub ee: f64,
    pub estimate: McEstimate,
    /// The EE varies less than its MC noise across the search bracket.
    pub flat: bool,
}

/// Simulator of a fixed `(M, K)` link. With perfect CSI the channel
/// statistics are computed once and reused for every `rho`.
pub struct LinkSimulator<'a> {
    m: usize,
    k: usize,
    coherence_block: u32,
    spec: PrecoderSpec,
    propagation: &'a PropagationModel,
    mc: McConfig,
    a_lambda: f64,
    shared_drop: Option<Vec<f64>>,
    cache: Option<Vec<TrialData>>,
}

fn draw_users<R: Rng + ?Sized>(propagation: &PropagationModel, k: usize, rng: &mut R) -> Vec<f64> {
    (0..k).map(|_| propagation.sample_user_variance(rng)).collect()
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

impl<'a> LinkSimulator<'a> {
    pub fn new(
        m: u32,
        k: u32,
        coherence_block: u32,
        spec: PrecoderSpec,
        propagation: &'a PropagationModel,
        mc: McConfig,
    ) -> Result<Self> {
        if k == 0 || m < k {
            return Err(eedesign_core::Error::Dimension { m, k }.into());
        }
        if spec.scheme == Scheme::Zf && m == k {
            return Err(invalid(format!("ZF needs M > K, got M = K = {k}")));
        }
        if k > coherence_block {
            return Err(eedesign_core::Error::PilotOverhead { k, t: coherence_block }.into());
        }
        if mc.trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        if let Some(xi) = spec.regularization {
            if !(xi > 0.0 && xi.is_finite()) {
                return Err(invalid("RZF regularisation must be > 0"));
            }
        }
        if let PilotEnergy::PerSymbol(e) = spec.pilot_energy {
            if !(e > 0.0 && e.is_finite()) {
                return Err(invalid("pilot energy must be > 0"));
            }
        }
        let a_lambda = propagation.a_lambda()?;
        let shared_drop = (!mc.resample_users)
            .then(|| draw_users(propagation, k as usize, &mut trial_rng(mc.seed, SHARED_DROP_STREAM)));
        let mut sim = Self {
            m: m as usize,
            k: k as usize,
            coherence_block,
            spec,
            propagation,
            mc,
            a_lambda,
            shared_drop,
            cache: None,
        };
        if spec.csi == Csi::Perfect {
            let cache = (0..u64::from(mc.trials))
                .into_par_iter()
                .map(|trial| sim.trial_channel(trial).and_then(|(ch, _)| sim.summarize(&ch.h)))
                .collect::<Result<Vec<_>>>()?;
            sim.cache = Some(cache);
        }
        Ok(sim)
    }

    pub fn a_lambda(&self) -> f64 {
        self.a_lambda
    }

    pub fn spec(&self) -> PrecoderSpec {
        self.spec
    }

    pub fn config(&self) -> McConfig {
        self.mc
    }

    fn sigma2(&self) -> f64 {
        self.propagation.noise_variance
    }

    fn prelog(&self) -> f64 {
        1.0 - self.k as f64 / f64::from(self.coherence_block)
    }

    /// Radiated energy of RZF and MRT, the ZF average `rho K A_lambda`.
    pub fn power_budget(&self, rho: f64) -> f64 {
        rho * self.k as f64 * self.a_lambda
    }

    fn regularization(&self, budget: f64) -> f64 {
        self.spec.regularization.unwrap_or_else(|| default_regularization(self.k, self.sigma2(), budget))
    }

    fn pilot_snr(&self, rho: f64) -> f64 {
        let per_symbol = match self.spec.pilot_energy {
            PilotEnergy::MatchDownlink => rho * self.a_lambda,
            PilotEnergy::PerSymbol(e) => e,
        };
        self.k as f64 * per_symbol / self.sigma2()
    }

    /// Channel of trial `trial` and the generator positioned after it.
    pub fn trial_channel(&self, trial: u64) -> Result<(ChannelRealization, ChaCha8Rng)> {
        let mut rng = trial_rng(self.mc.seed, trial);
        let variances = match &self.shared_drop {
            Some(v) => v.clone(),
            None => draw_users(self.propagation, self.k, &mut rng),
        };
        let channel = draw_channel(self.m, self.k, &variances, &mut rng)?;
        Ok((channel, rng))
    }

    fn summarize(&self, h: &CMatrix) -> Result<TrialData> {
        let k = self.k;
        let gram = || h.adjoint() * h;
        Ok(match self.spec.scheme {
            Scheme::Zf => {
                TrialData::Zf { inverse_trace: super::precoder::gram_inverse(h, 0.0)?.trace().re }
            }
            Scheme::Rzf => {
                let eig = gram().symmetric_eigen();
                let eigenvalues = eig.eigenvalues.iter().map(|l| l.max(0.0)).collect();
                let mut weights = vec![0.0; k * k];
                for row in 0..k {
                    for i in 0..k {
                        weights[row * k + i] = eig.eigenvectors[(row, i)].norm_sqr();
                    }
                }
                TrialData::Rzf { eigenvalues, weights }
            }
            Scheme::Mrt => {
                let gram = gram();
                let gain: Vec<f64> = (0..k).map(|i| gram[(i, i)].re).collect();
                if gain.iter().any(|&g| g <= 0.0) {
                    return Err(SimError::RankDeficient);
                }
                let interference = (0..k)
                    .map(|i| (0..k).filter(|&l| l != i).map(|l| gram[(i, l)].norm_sqr() / gain[l]).sum())
                    .collect();
                TrialData::Mrt { gain, interference }
            }
        })
    }

    /// Mean `log2(1 + SINR)` over users and radiated energy of one trial.
    fn cached_trial(&self, data: &TrialData, rho: f64) -> (f64, f64) {
        let (kf, s2) = (self.k as f64, self.sigma2());
        let budget = self.power_budget(rho);
        match data {
            TrialData::Zf { inverse_trace } => {
                let dof = (self.m - self.k) as f64;
                (log2_1p(rho * dof), rho * s2 * dof * inverse_trace)
            }
            TrialData::Mrt { gain, interference } => {
                let p = budget / kf;
                let rate = gain.iter().zip(interference).map(|(g, i)| log2_1p(p * g / (p * i + s2))).sum::<f64>();
                (rate / kf, budget)
            }
            TrialData::Rzf { eigenvalues, weights } => {
                let xi = self.regularization(budget);
                let g: Vec<f64> = eigenvalues.iter().map(|l| l / (l + xi)).collect();
                let norm: f64 = eigenvalues.iter().map(|l| l / ((l + xi) * (l + xi))).sum();
                let c2 = budget / norm;
                let rate = weights
                    .chunks_exact(self.k)
                    .map(|w| {
                        let signal: f64 = w.iter().zip(&g).map(|(w, g)| w * g).sum();
                        let total: f64 = w.iter().zip(&g).map(|(w, g)| w * g * g).sum();
                        let interference = (total - signal * signal).max(0.0);
                        log2_1p(c2 * signal * signal / (c2 * interference + s2))
                    })
                    .sum::<f64>();
                (rate / kf, budget)
            }
        }
    }

    fn explicit_trial(&self, trial: u64, rho: f64) -> Result<(f64, f64)> {
        let (channel, mut rng) = self.trial_channel(trial)?;
        let h = match self.spec.csi {
            Csi::Perfect => channel.h.clone(),
            Csi::Estimated => mmse_estimate(&channel, self.pilot_snr(rho), &mut rng)?,
        };
        let budget = self.power_budget(rho);
        let v = match self.spec.scheme {
            Scheme::Zf => precode_zf(&h, rho, self.sigma2())?,
            Scheme::Rzf => precode_rzf(&h, budget, self.regularization(budget))?,
            Scheme::Mrt => precode_mrt(&h, budget)?,
        };
        let sinrs = sinr(&channel.h, &v, self.sigma2());
        let rate = sinrs.iter().map(|&s| log2_1p(s)).sum::<f64>() / self.k as f64;
        Ok((rate, v.norm_squared()))
    }

    fn aggregate(&self, per_trial: &[(f64, f64)]) -> McEstimate {
        let n = per_trial.len() as f64;
        let mean = |f: fn(&(f64, f64)) -> f64| compensated_sum(per_trial.iter().map(f)) / n;
        let std_error = |f: fn(&(f64, f64)) -> f64, mu: f64| {
            if per_trial.len() < 2 {
                return 0.0;
            }
            let ss = compensated_sum(per_trial.iter().map(|t| (f(t) - mu).powi(2)));
            (ss / (n * (n - 1.0))).sqrt()
        };
        let rate = mean(|t| t.0);
        let tx = mean(|t| t.1);
        McEstimate {
            rate_per_ue: self.prelog() * rate,
            rate_std_error: self.prelog() * std_error(|t| t.0, rate),
            tx_energy: tx,
            tx_std_error: std_error(|t| t.1, tx),
            trials: self.mc.trials,
        }
    }

    fn check_rho(rho: f64) -> Result<()> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(invalid("rho must be finite and >= 0"));
        }
        Ok(())
    }

    fn silent(&self) -> McEstimate {
        McEstimate { rate_per_ue: 0.0, rate_std_error: 0.0, tx_energy: 0.0, tx_std_error: 0.0, trials: self.mc.trials }
    }

    /// Rate and energy averages at power `rho`.
    pub fn estimate(&self, rho: f64) -> Result<McEstimate> {
        Self::check_rho(rho)?;
        if rho == 0.0 {
            return Ok(self.silent());
        }
        match &self.cache {
            Some(cache) => {
                let per_trial: Vec<(f64, f64)> = cache.par_iter().map(|d| self.cached_trial(d, rho)).collect();
                Ok(self.aggregate(&per_trial))
            }
            None => self.estimate_explicit(rho),
        }
    }

    /// Same as [`estimate`](Self::estimate) but builds every precoder
    /// matrix explicitly.
    pub fn estimate_explicit(&self, rho: f64) -> Result<McEstimate> {
        Self::check_rho(rho)?;
        if rho == 0.0 {
            return Ok(self.silent());
        }
        let per_trial = (0..u64::from(self.mc.trials))
            .into_par_iter()
            .map(|trial| self.explicit_trial(trial, rho))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.aggregate(&per_trial))
    }

    pub fn ee(&self, rho: f64, coeffs: &PowerCoefficients) -> Result<f64> {
        self.estimate(rho)?.ee(self.m as u32, self.k as u32, coeffs)
    }

    /// Maximises the MC energy efficiency over `rho`: a log-spaced scan
    /// followed by golden-section search in `ln rho` down to 1% relative.
    pub fn optimize_rho(&self, coeffs: &PowerCoefficients) -> Result<RhoSearch> {
        let eval = |ln_rho: f64| -> Result<(f64, McEstimate)> {
            let est = self.estimate(ln_rho.exp())?;
            Ok((est.ee(self.m as u32, self.k as u32, coeffs)?, est))
        };
        let steps = ((RHO_GRID.1 - RHO_GRID.0) / RHO_GRID_STEP).round() as usize;
        let grid: Vec<f64> =
            (0..=steps).map(|i| (RHO_GRID.0 + i as f64 * RHO_GRID_STEP) * std::f64::consts::LN_10).collect();
        let values = grid.iter().map(|&u| eval(u)).collect::<Result<Vec<_>>>()?;
        let best = (0..values.len()).fold(0, |b, i| if values[i].0 > values[b].0 { i } else { b });
        let (lo, hi) = (best.saturating_sub(1), (best + 1).min(steps));

        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (grid[lo], grid[hi]);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = eval(x1)?;
        let mut f2 = eval(x2)?;
        while b - a > RHO_TOLERANCE {
            if f1.0 >= f2.0 {
                b = x2;
                (x2, f2) = (x1, f1);
                x1 = b - phi * (b - a);
                f1 = eval(x1)?;
            } else {
                a = x1;
                (x1, f1) = (x2, f2);
                x2 = a + phi * (b - a);
                f2 = eval(x2)?;
            }
        }
        let (mut u, mut f) = if f1.0 >= f2.0 { (x1, f1) } else { (x2, f2) };
        if values[best].0 > f.0 {
            (u, f) = (grid[best], values[best]);
        }
        let edge = values[lo].0.min(values[hi].0);
        let flat = f.0 - edge <= 2.0 * f.1.relative_noise() * f.0;
        Ok(RhoSearch { rho: u.exp(), ee: f.0, estimate: f.1, flat })
    }
}

/// Per-user MC rate (and radiated energy) at `(M, K, rho)`.
pub fn average_rates(
    m: u32,
    k: u32,
    coherence_block: u32,
    spec: PrecoderSpec,
    rho: f64,
    propagation: &PropagationModel,
    mc: McConfig,
) -> Result<McEstimate> {
    LinkSimulator::new(m, k, coherence_block, spec, propagation, mc)?.estimate(rho)
}

/// MC energy efficiency in bit/Joule.
pub fn ee_mc(
    m: u32,
    k: u32,
    rho: f64,
    spec: PrecoderSpec,
    coeffs: &PowerCoefficients,
    propagation: &PropagationModel,
    mc: McConfig,
) -> Result<f64> {
    LinkSimulator::new(m, k, coeffs.coherence_block(), spec, propagation, mc)?.ee(rho, coeffs)
}

/// EE-maximising `rho` under MC evaluation.
pub fn optimize_rho_mc(
    m: u32,
    k: u32,
    spec: PrecoderSpec,
    coeffs: &PowerCoefficients,
    propagation: &PropagationModel,
    mc: McConfig,
) -> Result<RhoSearch> {
    LinkSimulator::new(m, k, coeffs.coherence_block(), spec, propagation, mc)?.optimize_rho(coeffs)
}
