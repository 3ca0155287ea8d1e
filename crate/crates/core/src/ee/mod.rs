//! Energy efficiency of ZF precoding and its closed-form optimizers.
//!
//! With perfect CSI and ZF precoding every user gets
//! `(1 - K/T) log2(1 + rho (M - K))` bit per channel use for an average
//! transmit energy `rho K A_lambda`, so the energy efficiency is
//!
//! ```text
//!          K (1 - K/T) log2(1 + rho (M - K))
//! EE = -----------------------------------------------
//!      rho K A / eta + sum C[i][0] K^i + sum C[i][1] K^i M
//! ```
//!
//! Each of `M`, `rho` and `K` (the latter with `M/K` and `K rho` frozen) has a
//! closed-form maximizer when the other two are fixed.

mod quartic;
mod quasiconcave;

use core::f64::consts::{E, LN_2};
use core::ops::RangeInclusive;

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

pub use quartic::{horner, real_roots, residual_scale, ROOT_RESIDUAL};
pub use quasiconcave::QuasiconcaveProblem;

use crate::error::{invalid, Error, Result};
use crate::lambert::exp_w_plus_one;
use crate::power::PowerCoefficients;

/// A system configuration with its energy efficiency (bit/Joule).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPoint {
    pub m: u32,
    pub k: u32,
    pub rho: f64,
    pub ee: f64,
}

impl DesignPoint {
    /// Evaluates the ZF energy efficiency at `(m, k, rho)`.
    pub fn evaluate(m: u32, k: u32, rho: f64, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<Self> {
        Ok(Self { m, k, rho, ee: ee_zf(m, k, rho, coeffs, a_lambda)? })
    }

    /// Average radiated energy per channel use, `rho K A_lambda`.
    pub fn tx_energy(&self, a_lambda: f64) -> f64 {
        self.rho * f64::from(self.k) * a_lambda
    }

    /// Sum spectral efficiency in bit per channel use.
    pub fn sum_rate(&self, coherence_block: u32) -> f64 {
        let k = f64::from(self.k);
        k * (1.0 - k / f64::from(coherence_block)) * (self.rho * f64::from(self.m - self.k)).ln_1p() / LN_2
    }
}

fn require_nonnegative(coeffs: &PowerCoefficients) -> Result<()> {
    if coeffs.is_nonnegative() {
        Ok(())
    } else {
        Err(invalid("closed-form optima need non-negative power coefficients"))
    }
}

fn check_dims(m: u32, k: u32, coeffs: &PowerCoefficients) -> Result<()> {
    if k == 0 {
        return Err(invalid("at least one user must be served"));
    }
    if m < k {
        return Err(Error::Dimension { m, k });
    }
    if k >= coeffs.coherence_block() {
        return Err(Error::PilotOverhead { k, t: coeffs.coherence_block() });
    }
    Ok(())
}

/// ZF energy efficiency in bit/Joule.
pub fn ee_zf(m: u32, k: u32, rho: f64, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<f64> {
    check_dims(m, k, coeffs)?;
    if !(rho >= 0.0) {
        return Err(invalid("rho must be >= 0"));
    }
    Ok(ee_zf_relaxed(f64::from(m), f64::from(k), rho, coeffs, a_lambda))
}

/// ZF energy efficiency at real-valued `(M, K)` without domain checks.
pub fn ee_zf_relaxed(m: f64, k: f64, rho: f64, coeffs: &PowerCoefficients, a_lambda: f64) -> f64 {
    let t = f64::from(coeffs.coherence_block());
    let rate = k * (1.0 - k / t) * (rho * (m - k)).ln_1p() / LN_2;
    rate / (rho * k * a_lambda / coeffs.eta() + coeffs.circuit(m, k))
}

/// EE-optimal (continuous) number of antennas for fixed `K` and `rho`.
pub fn optimal_antennas(k: u32, rho: f64, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<f64> {
    require_nonnegative(coeffs)?;
    check_dims(k, k, coeffs)?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(invalid("rho must be > 0"));
    }
    let kf = f64::from(k);
    let d = coeffs.per_antenna_sum(kf);
    if d <= 0.0 {
        return Err(Error::Degenerate("no per-antenna circuit power, EE grows without bound in M"));
    }
    let problem = QuasiconcaveProblem::new(
        1.0 - kf * rho,
        rho,
        rho * kf * a_lambda / coeffs.eta() + coeffs.fixed_sum(kf),
        d,
        kf * (1.0 - kf / f64::from(coeffs.coherence_block())),
    )?;
    Ok(problem.maximizer()?.max(kf))
}

/// Normalised circuit energy `(M - K) eta circuit / (K A_lambda)`; the
/// closed-form power optimum is a function of this quantity alone.
fn power_ratio(m: u32, k: u32, coeffs: &PowerCoefficients, a_lambda: f64) -> f64 {
    let (mf, kf) = (f64::from(m), f64::from(k));
    (mf - kf) * coeffs.eta() * coeffs.circuit(mf, kf) / (kf * a_lambda)
}

/// EE-optimal normalised transmit power for fixed `M > K`.
pub fn optimal_power(m: u32, k: u32, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<f64> {
    require_nonnegative(coeffs)?;
    check_dims(m, k, coeffs)?;
    if m == k {
        return Err(Error::Dimension { m, k: k + 1 });
    }
    if !(a_lambda > 0.0) {
        return Err(invalid("A_lambda must be > 0"));
    }
    let y = power_ratio(m, k, coeffs, a_lambda);
    Ok((exp_w_plus_one((y - 1.0) / E)? - 1.0) / f64::from(m - k))
}

/// Lower bound on the optimal power for large `M`.
///
/// Valid once `(M - K)(C0 + C1 M) - 1 >= e^2`, with `C0`, `C1` the circuit
/// sums normalised by `K A_lambda / eta`; below that the bound on
/// `exp(W(x) + 1)` it relies on does not apply.
pub fn power_scaling_lower_bound(m: u32, k: u32, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<f64> {
    require_nonnegative(coeffs)?;
    check_dims(m, k, coeffs)?;
    if m == k {
        return Err(Error::Dimension { m, k: k + 1 });
    }
    let y = power_ratio(m, k, coeffs, a_lambda);
    if !(y - 1.0 >= E * E) {
        return Err(invalid("M is too small for the large-M power bound"));
    }
    let spread = f64::from(m - k);
    let log = (y - 1.0).ln();
    Ok((y / spread - log / spread) / (log - 1.0))
}

/// Constants of the users-optimisation problem at fixed antennas per user
/// `beta` and total normalised power `rho_tot`.
///
/// The objective is `(a K - b K^2) / sum_i c_i K^i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: [f64; 4],
}

impl QuarticCoefficients {
    pub fn new(beta: f64, rho_tot: f64, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<Self> {
        require_nonnegative(coeffs)?;
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(invalid("beta = M/K must be > 1"));
        }
        if !(rho_tot > 0.0 && rho_tot.is_finite()) {
            return Err(invalid("total power rho_tot must be > 0"));
        }
        let a = (rho_tot * (beta - 1.0)).ln_1p() / LN_2;
        let fixed = coeffs.fixed();
        let per = coeffs.per_antenna();
        let c = [
            fixed[0] + rho_tot * a_lambda / coeffs.eta(),
            fixed[1] + beta * per[0],
            fixed[2] + beta * per[1],
            fixed[3] + beta * per[2],
        ];
        Ok(Self { a, b: a / f64::from(coeffs.coherence_block()), c })
    }

    /// Stationarity polynomial, highest degree first.
    pub fn polynomial(&self) -> [f64; 5] {
        let (a, b, c) = (self.a, self.b, &self.c);
        [b * c[3], -2.0 * c[3] * a, -(a * c[2] + b * c[1]), -2.0 * b * c[0], c[0] * a]
    }

    /// Energy efficiency as a function of a real-valued `K`.
    pub fn objective(&self, k: f64) -> f64 {
        (self.a * k - self.b * k * k) / self.c.iter().rev().fold(0.0, |acc, &c| acc * k + c)
    }

    /// Positive root for a vanishing cubic coefficient.
    pub fn quadratic_optimum(&self) -> f64 {
        let denom = self.a * self.c[2] + self.b * self.c[1];
        let shift = self.b * self.c[0] / denom;
        (shift * shift + self.c[0] * self.a / denom).sqrt() - shift
    }
}

/// Real roots of the users-stationarity polynomial.
pub fn solve_quartic(q: &QuarticCoefficients) -> Vec<f64> {
    real_roots(&q.polynomial())
}

/// EE-optimal (continuous) number of users for fixed `beta = M/K` and
/// `rho_tot = K rho`.
pub fn optimal_users(beta: f64, rho_tot: f64, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<f64> {
    let q = QuarticCoefficients::new(beta, rho_tot, coeffs, a_lambda)?;
    let t = f64::from(coeffs.coherence_block());
    let feasible = |k: &f64| *k > 0.0 && *k < t;
    if q.c[3] == 0.0 {
        let k = q.quadratic_optimum();
        return if feasible(&k) { Ok(k) } else { Err(Error::Infeasible("no stationary K inside (0, T)")) };
    }
    let mut best: Option<(f64, f64)> = None;
    // roots come sorted, so ties resolve to the smaller K
    for k in solve_quartic(&q).into_iter().filter(feasible) {
        let value = q.objective(k);
        if best.map_or(true, |(_, v)| value > v) {
            best = Some((k, value));
        }
    }
    best.map(|(k, _)| k).ok_or(Error::Infeasible("no stationary K inside (0, T)"))
}

/// Picks the better of the two integers around a continuous optimum of a
/// quasiconcave objective, clamped to `range`. Ties go to the smaller one.
pub fn refine_integer(continuous: f64, objective: impl Fn(u32) -> f64, range: RangeInclusive<u32>) -> Result<u32> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo > hi {
        return Err(Error::EmptyRange);
    }
    if continuous.is_nan() {
        return Err(invalid("continuous optimum is NaN"));
    }
    let clamp = |v: f64| -> u32 {
        if v <= f64::from(lo) {
            lo
        } else if v >= f64::from(hi) {
            hi
        } else {
            v as u32
        }
    };
    let below = clamp(continuous.floor());
    let above = clamp(continuous.ceil());
    if below == above {
        return Ok(below);
    }
    Ok(if objective(above) > objective(below) { above } else { below })
}

#[cfg(test)]
mod tests;
