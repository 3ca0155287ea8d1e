//! Principal branch of the Lambert W function.
//!
//! `W0(x)` is the real solution `w >= -1` of `w * exp(w) = x` for `x >= -1/e`.
//! The closed-form optimizers only ever need `exp(W0(x) + 1)`, which is
//! exposed separately because it can be evaluated without cancellation for
//! large arguments (`exp(W0(x)) = x / W0(x)`).

use core::f64::consts::E;


#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// `1/e` split into a double plus its rounding residual, so that `x + 1/e`
/// keeps full relative accuracy next to the branch point.
const INV_E_HI: f64 = 0.367_879_441_171_442_33;
const INV_E_LO: f64 = -1.242_875_367_278_836_3e-17;

/// Absolute slack below `-1/e` that is still accepted as the branch point.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Lower end of the principal-branch domain, `-1/e`.
pub const BRANCH_POINT: f64 = -INV_E_HI;

/// Below this value of `p = sqrt(2 (e x + 1))` the branch-point series is
/// already exact to double precision.
const SERIES_ONLY: f64 = 1e-3;

/// Evaluates the principal branch `W0(x)`.
///
/// Arguments in `[-1/e - DOMAIN_SLACK, -1/e]` are clamped to the branch
/// point and return `-1`.
pub fn w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::LambertDomain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    // e*x + 1, computed as e*(x + 1/e) with the split constant
    let shifted = E * ((x + INV_E_HI) + INV_E_LO);
    if shifted <= 0.0 {
        if x < BRANCH_POINT - DOMAIN_SLACK {
            return Err(Error::LambertDomain(x));
        }
        return Ok(-1.0);
    }

    let guess = if x < -0.25 {
        let p = (2.0 * shifted).sqrt();
        let w = branch_series(p);
        if p < SERIES_ONLY {
            return Ok(w);
        }
        w
    } else if x < 3.0 {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(x, guess))
}

/// Evaluates `exp(W0(x) + 1)`, the kernel shared by all closed-form optima.
pub fn exp_w_plus_one(x: f64) -> Result<f64> {
    let w = w0(x)?;
    if w > 0.5 {
        Ok(E * x / w)
    } else {
        Ok((w + 1.0).exp())
    }
}

/// Series of `W0` around the branch point in `p = sqrt(2 (e x + 1))`.
fn branch_series(p: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17280.0,
        -221.0 / 8505.0,
        680_863.0 / 43_545_600.0,
    ];
    COEFFS.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..16 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 <= 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    w
}
