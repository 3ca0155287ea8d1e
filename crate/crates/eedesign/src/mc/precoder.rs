//! Linear precoders and the per-user SINR they produce.

use num_complex::Complex64;

use super::channel::CMatrix;
use crate::error::{invalid, Result, SimError};

/// Smallest admissible squared Cholesky pivot relative to the largest
/// diagonal entry of the Gram matrix.
const PIVOT_FLOOR: f64 = 1e-13;

pub(crate) fn gram_inverse(h: &CMatrix, shift: f64) -> Result<CMatrix> {
    let mut gram = h.adjoint() * h;
    for i in 0..gram.nrows() {
        gram[(i, i)] += Complex64::new(shift, 0.0);
    }
    let scale = gram.diagonal().iter().fold(0.0f64, |acc, d| acc.max(d.re));
    let chol = gram.cholesky().ok_or(SimError::RankDeficient)?;
    if chol.l_dirty().diagonal().iter().any(|d| d.norm_sqr() <= PIVOT_FLOOR * scale) {
        return Err(SimError::RankDeficient);
    }
    Ok(chol.inverse())
}

/// ZF precoder `sqrt(rho sigma2 (M - K)) H (H^H H)^-1`.
///
/// Every user sees the deterministic gain `sqrt(rho sigma2 (M - K))` and no
/// interference.
pub fn precode_zf(h: &CMatrix, rho: f64, sigma2: f64) -> Result<CMatrix> {
    let (m, k) = h.shape();
    if m <= k {
        return Err(invalid(format!("ZF needs M > K, got M = {m}, K = {k}")));
    }
    if !(rho >= 0.0 && sigma2 > 0.0) {
        return Err(invalid("ZF needs rho >= 0 and sigma2 > 0"));
    }
    let scale = (rho * sigma2 * (m - k) as f64).sqrt();
    Ok(h * gram_inverse(h, 0.0)? * Complex64::new(scale, 0.0))
}

/// MRT precoder with the budget split equally: `v_k = sqrt(budget/K) h_k/|h_k|`.
pub fn precode_mrt(h: &CMatrix, power_budget: f64) -> Result<CMatrix> {
    if !(power_budget > 0.0) {
        return Err(invalid("power budget must be > 0"));
    }
    let per_user = (power_budget / h.ncols() as f64).sqrt();
    let mut v = h.clone();
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        if norm == 0.0 {
            return Err(SimError::RankDeficient);
        }
        col *= Complex64::new(per_user / norm, 0.0);
    }
    Ok(v)
}

/// Regularisation `K sigma2 / budget` of the MMSE-type RZF precoder.
pub fn default_regularization(k: usize, sigma2: f64, power_budget: f64) -> f64 {
    k as f64 * sigma2 / power_budget
}

/// RZF precoder `c H (H^H H + xi I)^-1` scaled so that `tr(V^H V) = budget`.
pub fn precode_rzf(h: &CMatrix, power_budget: f64, xi: f64) -> Result<CMatrix> {
    let (m, k) = h.shape();
    if m < k {
        return Err(invalid(format!("RZF needs M >= K, got M = {m}, K = {k}")));
    }
    if !(power_budget > 0.0) || !(xi >= 0.0) {
        return Err(invalid("RZF needs a positive budget and xi >= 0"));
    }
    let w = h * gram_inverse(h, xi)?;
    let norm2 = w.norm_squared();
    Ok(w * Complex64::new((power_budget / norm2).sqrt(), 0.0))
}

/// Received SINR of every user: `|h_k^H v_k|^2 / (sum_{l != k} |h_k^H v_l|^2 + sigma2)`.
pub fn sinr(h: &CMatrix, v: &CMatrix, sigma2: f64) -> Vec<f64> {
    let e = h.adjoint() * v;
    (0..e.nrows())
        .map(|k| {
            let total: f64 = e.row(k).iter().map(|x| x.norm_sqr()).sum();
            let signal = e[(k, k)].norm_sqr();
            signal / ((total - signal).max(0.0) + sigma2)
        })
        .collect()
}
