//! Best design per antenna count: the data behind power-scaling and
//! EE-versus-antennas curves.
//!
//! ZF with perfect CSI uses the closed-form power optimum and an exhaustive
//! scan over `K`. Every other precoder is evaluated by Monte Carlo with the
//! power optimised per `K`; `K = 1` is scored on its own and the remaining
//! user counts by integer golden-section search.

use std::collections::BTreeMap;

use eedesign_core::design::best_at;
use eedesign_core::{PowerCoefficients, PropagationModel};

use crate::error::{invalid, Result};
use crate::mc::{CircuitModel, Csi, LinkSimulator, McConfig, PrecoderSpec, Scheme};

/// EE-maximising design of one scheme at a fixed antenna count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub spec: PrecoderSpec,
    pub m: u32,
    pub k: u32,
    pub rho: f64,
    /// bit/Joule
    pub ee: f64,
    /// bit/c.u.
    pub sum_rate: f64,
    /// J/c.u.
    pub tx_energy: f64,
    /// 0 for closed-form rows.
    pub trials: u32,
    /// The MC power search saw no EE variation above its noise.
    pub flat: bool,
}

/// Whether `spec` is evaluated in closed form by the sweeps.
pub fn is_analytic(spec: &PrecoderSpec) -> bool {
    spec.scheme == Scheme::Zf && spec.csi == Csi::Perfect
}

/// Maximiser of a unimodal function on the integers `lo..=hi`; ties go to
/// the smaller argument. Each point is evaluated at most once.
pub fn argmax_unimodal(lo: u32, hi: u32, mut f: impl FnMut(u32) -> Result<f64>) -> Result<(u32, f64)> {
    if lo > hi {
        return Err(invalid("empty search range"));
    }
    let mut memo = BTreeMap::new();
    let mut eval = |x: u32| -> Result<f64> {
        if let Some(&v) = memo.get(&x) {
            return Ok(v);
        }
        let v = f(x)?;
        memo.insert(x, v);
        Ok(v)
    };
    let (mut a, mut b) = (lo, hi);
    while b - a > 3 {
        let span = f64::from(b - a);
        let c = a + (0.381_966 * span).round() as u32;
        let d = (a + (0.618_034 * span).round() as u32).max(c + 1);
        if eval(c)? >= eval(d)? {
            b = d;
        } else {
            a = c;
        }
    }
    let mut best = (a, eval(a)?);
    for x in a + 1..=b {
        let v = eval(x)?;
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// Closed-form ZF optimum over all `K < min(M, T)`.
pub fn best_zf(m: u32, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<SweepRow> {
    let top = (m - 1).min(coeffs.coherence_block() - 1);
    if m < 2 {
        return Err(invalid("ZF needs at least 2 antennas"));
    }
    let mut best = best_at(m, 1, None, coeffs, a_lambda)?;
    for k in 2..=top {
        let point = best_at(m, k, None, coeffs, a_lambda)?;
        if point.ee > best.ee {
            best = point;
        }
    }
    Ok(SweepRow {
        spec: PrecoderSpec::perfect(Scheme::Zf),
        m,
        k: best.k,
        rho: best.rho,
        ee: best.ee,
        sum_rate: best.sum_rate(coeffs.coherence_block()),
        tx_energy: best.tx_energy(a_lambda),
        trials: 0,
        flat: false,
    })
}

/// MC optimum of `spec` at `M` antennas, power optimised for each `K`.
pub fn best_mc(
    m: u32,
    spec: PrecoderSpec,
    coeffs: &PowerCoefficients,
    propagation: &PropagationModel,
    mc: McConfig,
) -> Result<SweepRow> {
    let zf_margin = u32::from(spec.scheme == Scheme::Zf);
    let top = (m - zf_margin.min(m)).min(coeffs.coherence_block() - 1);
    if top == 0 {
        return Err(invalid(format!("no feasible user count at M = {m}")));
    }
    let mut found = BTreeMap::new();
    let mut eval = |k: u32| -> Result<f64> {
        let sim = LinkSimulator::new(m, k, coeffs.coherence_block(), spec, propagation, mc)?;
        let search = sim.optimize_rho(coeffs)?;
        found.insert(k, (search, sim.power_budget(search.rho)));
        Ok(search.ee)
    };
    // a single user sees no interference, so K = 1 can be an isolated peak
    let single = eval(1)?;
    let k = if top >= 2 {
        let (k, ee) = argmax_unimodal(2, top, &mut eval)?;
        if ee > single { k } else { 1 }
    } else {
        1
    };
    let (search, budget) = found[&k];
    let tx_energy = if spec.scheme == Scheme::Zf { search.estimate.tx_energy } else { budget };
    Ok(SweepRow {
        spec,
        m,
        k,
        rho: search.rho,
        ee: search.ee,
        sum_rate: search.estimate.sum_rate(k),
        tx_energy,
        trials: mc.trials,
        flat: search.flat,
    })
}

/// One row per antenna count and precoder, in input order. Each scheme is
/// charged the circuit power of its own precoder family.
pub fn antenna_sweep(
    antennas: &[u32],
    specs: &[PrecoderSpec],
    circuit: &CircuitModel,
    propagation: &PropagationModel,
    mc: McConfig,
) -> Result<Vec<SweepRow>> {
    let a_lambda = propagation.a_lambda()?;
    let mut rows = Vec::with_capacity(antennas.len() * specs.len());
    for spec in specs {
        let coeffs = circuit.for_scheme(spec.scheme);
        for &m in antennas {
            rows.push(if is_analytic(spec) {
                best_zf(m, coeffs, a_lambda)?
            } else {
                best_mc(m, *spec, coeffs, propagation, mc)?
            });
        }
    }
    Ok(rows)
}
