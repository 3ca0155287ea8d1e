use core::f64::consts::{E, LN_2};

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::lambert::exp_w_plus_one;

/// `maximize_{z > -a/b}  f log2(a + b z) / (c + d z)`.
///
/// The objective is strictly quasiconcave for `b, d, f > 0` and `c >= 0`;
/// it increases below the maximizer and decreases above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiconcaveProblem {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f: f64,
}

impl QuasiconcaveProblem {
    pub fn new(a: f64, b: f64, c: f64, d: f64, f: f64) -> Result<Self> {
        let p = Self { a, b, c, d, f };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() {
            return Err(invalid("a must be finite"));
        }
        if !(self.b > 0.0 && self.d > 0.0 && self.f > 0.0) {
            return Err(invalid("b, d and f must be > 0"));
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(invalid("c must be >= 0"));
        }
        Ok(())
    }

    pub fn objective(&self, z: f64) -> f64 {
        self.f * (self.a + self.b * z).ln() / LN_2 / (self.c + self.d * z)
    }

    /// Lambert W argument `(bc - ad) / (d e)`.
    pub fn lambert_argument(&self) -> f64 {
        (self.b * self.c - self.a * self.d) / (self.d * E)
    }

    /// The unique maximizer `(exp(W0((bc - ad)/(de)) + 1) - a) / b`.
    pub fn maximizer(&self) -> Result<f64> {
        self.validate()?;
        Ok((exp_w_plus_one(self.lambert_argument())? - self.a) / self.b)
    }
}
