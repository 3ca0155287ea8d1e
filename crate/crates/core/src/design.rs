//! Joint choice of antennas, users and power.
//!
//! [`exhaustive_search`] scans every integer `(M, K)` pair with the
//! closed-form power optimum and is guaranteed to find the global optimum of
//! the grid. [`alternating_optimize`] instead cycles users -> antennas ->
//! power with the single-variable optima until the integers stop moving.

use core::ops::RangeInclusive;

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::ee::{ee_zf, optimal_antennas, optimal_power, optimal_users, refine_integer, DesignPoint};
use crate::error::{invalid, Error, Result};
use crate::power::PowerCoefficients;

/// Iteration cap for the alternating search.
pub const DEFAULT_MAX_ITER: u32 = 50;

/// Integer ranges scanned by the exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub antennas: RangeInclusive<u32>,
    pub users: RangeInclusive<u32>,
    /// Optional upper limit on `rho`; the optimum is clipped to it.
    pub rho_cap: Option<f64>,
}

impl SearchSpace {
    pub fn new(antennas: RangeInclusive<u32>, users: RangeInclusive<u32>) -> Self {
        Self { antennas, users, rho_cap: None }
    }

    /// Antennas up to 1000 and users up to `min(T - 1, 500)`.
    pub fn default_for(coeffs: &PowerCoefficients) -> Self {
        Self::new(1..=1000, 1..=(coeffs.coherence_block() - 1).min(500))
    }

    pub fn validate(&self, coeffs: &PowerCoefficients) -> Result<()> {
        if *self.users.start() < 1 {
            return Err(invalid("the user range must start at K >= 1"));
        }
        if *self.users.end() >= coeffs.coherence_block() {
            return Err(Error::PilotOverhead { k: *self.users.end(), t: coeffs.coherence_block() });
        }
        if self.users.is_empty() || self.antennas.is_empty() {
            return Err(Error::EmptyRange);
        }
        if *self.antennas.end() < *self.users.start() {
            return Err(Error::EmptyRange);
        }
        if let Some(cap) = self.rho_cap {
            if !(cap > 0.0) {
                return Err(invalid("rho cap must be > 0"));
            }
        }
        Ok(())
    }

    fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.antennas.clone().flat_map(move |m| {
            let top = m.min(*self.users.end());
            (*self.users.start()..=top).map(move |k| (m, k))
        })
    }
}

/// Best design at fixed `(M, K)`: the closed-form power, clipped to the cap.
pub fn best_at(m: u32, k: u32, cap: Option<f64>, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<DesignPoint> {
    if m == k {
        // no array gain left under ZF
        ee_zf(m, k, 0.0, coeffs, a_lambda)?;
        return Ok(DesignPoint { m, k, rho: 0.0, ee: 0.0 });
    }
    let mut rho = optimal_power(m, k, coeffs, a_lambda)?;
    if let Some(cap) = cap {
        rho = rho.min(cap);
    }
    DesignPoint::evaluate(m, k, rho, coeffs, a_lambda)
}

/// EE at every feasible grid point with the optimal power, rows ordered by
/// `M` then `K`.
pub fn ee_surface(space: &SearchSpace, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<Vec<DesignPoint>> {
    space.validate(coeffs)?;
    space.pairs().map(|(m, k)| best_at(m, k, space.rho_cap, coeffs, a_lambda)).collect()
}

/// Global optimum over the grid. Ties go to smaller `M`, then smaller `K`.
pub fn exhaustive_search(space: &SearchSpace, coeffs: &PowerCoefficients, a_lambda: f64) -> Result<DesignPoint> {
    space.validate(coeffs)?;
    if coeffs.per_antenna().iter().all(|&c| c == 0.0) {
        return Err(Error::Degenerate("no per-antenna circuit power, EE is unbounded in M"));
    }
    let mut best: Option<DesignPoint> = None;
    for (m, k) in space.pairs() {
        let point = best_at(m, k, space.rho_cap, coeffs, a_lambda)?;
        if best.map_or(true, |b| point.ee > b.ee) {
            best = Some(point);
        }
    }
    best.ok_or(Error::EmptyRange)
}

/// Sub-step of an alternating iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Initial,
    Users,
    Antennas,
    Power,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingTrace {
    /// Start point followed by the design after each full iteration.
    pub iterations: Vec<DesignPoint>,
    /// Design after every sub-step.
    pub steps: Vec<(Stage, DesignPoint)>,
    pub converged: bool,
    pub iteration_count: u32,
}

impl AlternatingTrace {
    pub fn last(&self) -> DesignPoint {
        self.iterations[self.iterations.len() - 1]
    }
}

/// Alternating optimisation from `(m, k, rho)`.
///
/// Each iteration:
/// 1. updates `K` from the users optimum at the current antennas per user
///    `beta = M/K` and total power `K rho`, keeping `beta`;
/// 2. replaces `M` by its optimum for the new `K`;
/// 3. sets `rho` to its optimum for the new `(M, K)`.
///
/// Integer candidates are scored with the ZF EE, and a sub-step is only
/// taken if it does not lower the EE. Stops once an iteration leaves both
/// `M` and `K` unchanged, or after `max_iter` iterations.
pub fn alternating_optimize(
    m: u32,
    k: u32,
    rho: f64,
    coeffs: &PowerCoefficients,
    a_lambda: f64,
    max_iter: u32,
) -> Result<AlternatingTrace> {
    if !(rho > 0.0) {
        return Err(invalid("initial rho must be > 0"));
    }
    let mut current = DesignPoint::evaluate(m, k, rho, coeffs, a_lambda)?;
    let mut trace = AlternatingTrace {
        iterations: alloc::vec![current],
        steps: alloc::vec![(Stage::Initial, current)],
        converged: false,
        iteration_count: 0,
    };
    let max_users = coeffs.coherence_block() - 1;
    let eval = |m: u32, k: u32, rho: f64| DesignPoint::evaluate(m, k, rho, coeffs, a_lambda);

    for _ in 0..max_iter {
        let before = (current.m, current.k);

        if current.m > current.k {
            let beta = f64::from(current.m) / f64::from(current.k);
            let rho_tot = f64::from(current.k) * current.rho;
            let antennas_for = |k: u32| ((beta * f64::from(k)).round() as u32).max(k);
            let users = optimal_users(beta, rho_tot, coeffs, a_lambda)?;
            let k = refine_integer(
                users,
                |k| ee_zf(antennas_for(k), k, current.rho, coeffs, a_lambda).unwrap_or(0.0),
                1..=max_users,
            )?;
            let candidate = eval(antennas_for(k), k, current.rho)?;
            if candidate.ee >= current.ee {
                current = candidate;
            }
        }
        trace.steps.push((Stage::Users, current));

        let antennas = optimal_antennas(current.k, current.rho, coeffs, a_lambda)?;
        let m = refine_integer(
            antennas,
            |m| ee_zf(m, current.k, current.rho, coeffs, a_lambda).unwrap_or(0.0),
            current.k..=u32::MAX,
        )?;
        let candidate = eval(m, current.k, current.rho)?;
        if candidate.ee >= current.ee {
            current = candidate;
        }
        trace.steps.push((Stage::Antennas, current));

        if current.m > current.k {
            let candidate = eval(current.m, current.k, optimal_power(current.m, current.k, coeffs, a_lambda)?)?;
            if candidate.ee >= current.ee {
                current = candidate;
            }
        }
        trace.steps.push((Stage::Power, current));

        trace.iterations.push(current);
        trace.iteration_count += 1;
        if (current.m, current.k) == before {
            trace.converged = true;
            break;
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::HardwareProfile;
    use crate::propagation::PropagationModel;
    use rand::{Rng, SeedableRng};

    fn reference() -> (PowerCoefficients, f64) {
        (HardwareProfile::default().coefficients().unwrap(), PropagationModel::default().a_lambda().unwrap())
    }

    #[test]
    fn reference_grid_optimum() {
        let (c, a) = reference();
        let best = exhaustive_search(&SearchSpace::new(1..=250, 1..=150), &c, a).unwrap();
        assert_eq!((best.m, best.k), (166, 85));
        assert!((best.rho - 4.6097).abs() <= 0.05 * 4.6097);
    }

    #[test]
    fn single_user_column_matches_enumeration() {
        let (c, a) = reference();
        let best = exhaustive_search(&SearchSpace::new(1..=10, 1..=1), &c, a).unwrap();
        let brute = (2..=10u32)
            .map(|m| {
                let rho = optimal_power(m, 1, &c, a).unwrap();
                (m, ee_zf(m, 1, rho, &c, a).unwrap())
            })
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert_eq!(best.m, brute.0);
        assert_eq!(best.ee, brute.1);
    }

    #[test]
    fn unbounded_without_antenna_cost() {
        let (c, a) = reference();
        let c = c.with_per_antenna([0.0; 3]).unwrap();
        assert!(matches!(exhaustive_search(&SearchSpace::new(1..=50, 1..=5), &c, a), Err(Error::Degenerate(_))));
    }

    #[test]
    fn invalid_spaces() {
        let (c, a) = reference();
        assert!(exhaustive_search(&SearchSpace::new(1..=50, 0..=5), &c, a).is_err());
        assert!(exhaustive_search(&SearchSpace::new(1..=50, 1..=5760), &c, a).is_err());
        assert!(exhaustive_search(&SearchSpace::new(1..=3, 5..=8), &c, a).is_err());
    }

    #[test]
    fn rho_cap_clips() {
        let (c, a) = reference();
        let mut space = SearchSpace::new(1..=250, 1..=150);
        space.rho_cap = Some(1.0);
        let best = exhaustive_search(&space, &c, a).unwrap();
        assert!(best.rho <= 1.0);
    }

    #[test]
    fn surface_rows() {
        let (c, a) = reference();
        let space = SearchSpace::new(1..=60, 1..=30);
        let rows = ee_surface(&space, &c, a).unwrap();
        assert!(rows.iter().all(|r| r.m >= r.k));
        assert!(rows.iter().filter(|r| r.m == r.k).all(|r| r.ee == 0.0));
        for r in rows.iter().step_by(37).filter(|r| r.m > r.k) {
            assert!((ee_zf(r.m, r.k, r.rho, &c, a).unwrap() - r.ee).abs() <= 1e-12 * r.ee);
        }
        let again = ee_surface(&space, &c, a).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn surface_peak_is_exhaustive_optimum() {
        let (c, a) = reference();
        let space = SearchSpace::new(1..=250, 1..=150);
        let rows = ee_surface(&space, &c, a).unwrap();
        let peak = rows.iter().fold(rows[0], |b, r| if r.ee > b.ee { *r } else { b });
        assert_eq!((peak.m, peak.k), (166, 85));
    }

    #[test]
    fn surface_unimodal_along_axes() {
        let (c, a) = reference();
        let count_peaks = |v: &[f64]| (1..v.len() - 1).filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1]).count();
        for k in [1u32, 10, 85, 140] {
            let v: Vec<f64> = (k + 1..=600).map(|m| best_at(m, k, None, &c, a).unwrap().ee).collect();
            assert!(count_peaks(&v) <= 1, "K = {k}");
        }
        for m in [20u32, 166, 400] {
            let v: Vec<f64> = (1..m).map(|k| best_at(m, k, None, &c, a).unwrap().ee).collect();
            assert!(count_peaks(&v) <= 1, "M = {m}");
        }
    }

    #[test]
    fn alternating_from_small_start() {
        let (c, a) = reference();
        let trace = alternating_optimize(3, 1, 1.0, &c, a, DEFAULT_MAX_ITER).unwrap();
        assert!(trace.converged);
        assert!(trace.iteration_count <= 10, "{}", trace.iteration_count);
        for w in trace.steps.windows(2) {
            assert!(w[1].1.ee >= w[0].1.ee);
        }
        let best = exhaustive_search(&SearchSpace::new(1..=250, 1..=150), &c, a).unwrap();
        assert!(trace.last().ee >= 0.95 * best.ee);
    }

    #[test]
    fn alternating_fixed_point() {
        let (c, a) = reference();
        let best = exhaustive_search(&SearchSpace::new(1..=250, 1..=150), &c, a).unwrap();
        let trace = alternating_optimize(best.m, best.k, best.rho, &c, a, DEFAULT_MAX_ITER).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iteration_count, 1);
        assert_eq!((trace.last().m, trace.last().k), (best.m, best.k));
    }

    #[test]
    fn alternating_random_starts() {
        let (c, a) = reference();
        let best = exhaustive_search(&SearchSpace::default_for(&c), &c, a).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let k: u32 = rng.random_range(1..200);
            let m: u32 = k + rng.random_range(1..400);
            let rho = 10f64.powf(rng.random_range(-2.0..2.0));
            let trace = alternating_optimize(m, k, rho, &c, a, DEFAULT_MAX_ITER).unwrap();
            for w in trace.steps.windows(2) {
                assert!(w[1].1.ee >= w[0].1.ee);
            }
            assert!(trace.last().ee <= best.ee * (1.0 + 1e-12));
        }
    }

    #[test]
    fn alternating_iteration_cap() {
        let (c, a) = reference();
        let trace = alternating_optimize(3, 1, 1.0, &c, a, 2).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.iteration_count, 2);
        assert_eq!(trace.iterations.len(), 3);
    }
}
