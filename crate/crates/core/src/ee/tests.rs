use super::*;
use crate::power::HardwareProfile;
use crate::propagation::PropagationModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference() -> (PowerCoefficients, f64) {
    (HardwareProfile::default().coefficients().unwrap(), PropagationModel::default().a_lambda().unwrap())
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > rel_tol * hi.abs().max(1e-300) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

fn random_coeffs(rng: &mut ChaCha8Rng) -> PowerCoefficients {
    let mut log_uniform = |lo: f64, hi: f64| 10f64.powf(rng.random_range(lo..hi));
    PowerCoefficients::new(
        [log_uniform(-8.0, -5.0), log_uniform(-9.0, -6.0), log_uniform(-14.0, -11.0), log_uniform(-15.0, -12.0)],
        [log_uniform(-9.0, -6.0), log_uniform(-11.0, -8.0), log_uniform(-14.0, -11.0)],
        rng.random_range(0.1..1.0),
        5760,
    )
    .unwrap()
}

#[test]
fn ee_edge_values() {
    let (c, a) = reference();
    assert_eq!(ee_zf(100, 10, 0.0, &c, a).unwrap(), 0.0);
    assert_eq!(ee_zf(40, 40, 3.0, &c, a).unwrap(), 0.0);
    assert!(matches!(ee_zf(3, 4, 1.0, &c, a), Err(Error::Dimension { .. })));
    assert!(matches!(ee_zf(6000, 5760, 1.0, &c, a), Err(Error::PilotOverhead { .. })));
    assert!(ee_zf(10, 0, 1.0, &c, a).is_err());
}

#[test]
fn ee_at_reference_optimum() {
    // 30-digit re-evaluation of the ZF EE expression for the reference hardware
    let (c, a) = reference();
    let ee = ee_zf(165, 85, 4.6097, &c, a).unwrap();
    assert!((ee - 7_527_867.611_724_959).abs() <= 1e-11 * ee, "{ee}");
    let p = c.total_power(165, 85, 4.6097 * 85.0 * a).unwrap();
    assert!((p - 9.489_978_287_387_014e-5).abs() <= 1e-12 * p);
}

#[test]
fn ee_vanishes_at_extremes() {
    let (c, a) = reference();
    assert!(ee_zf(10_000_000, 85, 4.6, &c, a).unwrap() < 1e-2 * ee_zf(165, 85, 4.6, &c, a).unwrap());
    assert!(ee_zf(165, 85, 1e12, &c, a).unwrap() < 1e-3 * ee_zf(165, 85, 4.6, &c, a).unwrap());
    assert!(ee_zf(165, 85, 1e-12, &c, a).unwrap() < 1e-9 * ee_zf(165, 85, 4.6, &c, a).unwrap());
}

#[test]
fn antennas_at_reference_point() {
    let (c, a) = reference();
    let m = optimal_antennas(85, 4.6097, &c, a).unwrap();
    let refined = refine_integer(m, |m| ee_zf(m, 85, 4.6097, &c, a).unwrap(), 85..=u32::MAX).unwrap();
    assert!((162..=168).contains(&refined), "{refined}");
}

#[test]
fn antennas_follow_circuit_costs() {
    let (c, a) = reference();
    let base = optimal_antennas(20, 3.0, &c, a).unwrap();
    let fixed = c.fixed().map(|v| 2.0 * v);
    let more_fixed = optimal_antennas(20, 3.0, &c.with_fixed(fixed).unwrap(), a).unwrap();
    let per = c.per_antenna().map(|v| 2.0 * v);
    let more_per = optimal_antennas(20, 3.0, &c.with_per_antenna(per).unwrap(), a).unwrap();
    assert!(more_fixed > base);
    assert!(more_per < base);
}

#[test]
fn antennas_without_per_antenna_cost() {
    let (c, a) = reference();
    let c = c.with_per_antenna([0.0; 3]).unwrap();
    assert!(matches!(optimal_antennas(10, 1.0, &c, a), Err(Error::Degenerate(_))));
}

#[test]
fn antennas_match_integer_scan() {
    let (_, a) = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let c = random_coeffs(&mut rng);
        let k: u32 = rng.random_range(1..60);
        let rho = 10f64.powf(rng.random_range(-1.0..1.5));
        let m = optimal_antennas(k, rho, &c, a).unwrap();
        let refined = refine_integer(m, |m| ee_zf(m, k, rho, &c, a).unwrap(), k..=100_000).unwrap();
        let scan = (k..=100_000)
            .max_by(|&x, &y| ee_zf(x, k, rho, &c, a).unwrap().total_cmp(&ee_zf(y, k, rho, &c, a).unwrap()))
            .unwrap();
        assert_eq!(refined, scan);
    }
}

#[test]
fn power_at_reference_point() {
    let (c, a) = reference();
    let rho = optimal_power(165, 85, &c, a).unwrap();
    assert!((rho - 4.6097).abs() <= 0.05 * 4.6097, "{rho}");
    assert!(optimal_power(85, 85, &c, a).is_err());
}

#[test]
fn power_vanishes_with_circuit() {
    let (c, a) = reference();
    let mut last = f64::INFINITY;
    for scale in [1e-2, 1e-4, 1e-8, 1e-12] {
        let tiny = PowerCoefficients::new(
            c.fixed().map(|v| v * scale),
            c.per_antenna().map(|v| v * scale),
            c.eta(),
            c.coherence_block(),
        )
        .unwrap();
        let rho = optimal_power(100, 10, &tiny, a).unwrap();
        assert!(rho > 0.0 && rho < last);
        last = rho;
    }
    assert!(last < 1e-6);
}

#[test]
fn power_matches_golden_section() {
    let (_, a) = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let c = random_coeffs(&mut rng);
        let k: u32 = rng.random_range(1..100);
        let m: u32 = k + rng.random_range(1..400);
        let rho = optimal_power(m, k, &c, a).unwrap();
        let f = |lr: f64| ee_zf_relaxed(f64::from(m), f64::from(k), lr.exp(), &c, a);
        let oracle = golden_max(f, (1e-9f64).ln(), (1e6f64).ln(), 1e-12).exp();
        assert!((rho - oracle).abs() <= 1e-6 * oracle, "{rho} vs {oracle}");
    }
}

#[test]
fn lower_bound_holds() {
    let (c, a) = reference();
    for m in (1..=10).map(|i| 100 * i) {
        let rho = optimal_power(m, 85, &c, a).unwrap();
        let bound = power_scaling_lower_bound(m, 85, &c, a).unwrap();
        assert!(rho >= bound, "M = {m}: {rho} < {bound}");
    }
}

#[test]
fn lower_bound_growth() {
    let (c, a) = reference();
    // with per-antenna costs the bound grows like M / ln M
    let b3 = power_scaling_lower_bound(1_000, 10, &c, a).unwrap();
    let b4 = power_scaling_lower_bound(10_000, 10, &c, a).unwrap();
    let b5 = power_scaling_lower_bound(100_000, 10, &c, a).unwrap();
    assert!(b4 > b3 && b5 > b4);
    let trend = |lo: f64, hi: f64| (hi / lo.ln()) / (lo / hi.ln());
    assert!((b5 / b4) / trend(1e4, 1e5) > 0.5 && (b5 / b4) / trend(1e4, 1e5) < 2.0);

    // without them it decays like 1 / ln M
    let flat = c.with_per_antenna([0.0; 3]).unwrap();
    let mut prev = f64::INFINITY;
    for m in [1_000u32, 10_000, 100_000, 1_000_000] {
        let b = power_scaling_lower_bound(m, 10, &flat, a).unwrap();
        assert!(b < prev);
        prev = b;
    }
}

#[test]
fn lower_bound_precondition() {
    let (c, a) = reference();
    let cheap = PowerCoefficients::new(c.fixed().map(|v| v * 1e-9), [0.0; 3], c.eta(), c.coherence_block()).unwrap();
    assert!(power_scaling_lower_bound(12, 10, &cheap, a).is_err());
}

#[test]
fn quartic_reduces_to_quadratic() {
    let (c, a) = reference();
    let c = c.with_fixed([c.fixed()[0], c.fixed()[1], 0.0, 0.0]).unwrap();
    let c = c.with_per_antenna([c.per_antenna()[0], c.per_antenna()[1], 0.0]).unwrap();
    let q = QuarticCoefficients::new(2.0, 50.0, &c, a).unwrap();
    assert_eq!(q.c[3], 0.0);
    let closed = q.quadratic_optimum();
    let roots = solve_quartic(&q);
    let positive: Vec<f64> = roots.into_iter().filter(|r| *r > 0.0).collect();
    assert_eq!(positive.len(), 1);
    assert!((positive[0] - closed).abs() <= 1e-10 * closed);
    assert_eq!(optimal_users(2.0, 50.0, &c, a).unwrap(), closed);
}

#[test]
fn quartic_only_static_power() {
    let q = QuarticCoefficients { a: 3.0, b: 3.0 / 5760.0, c: [1e-6, 0.0, 0.0, 0.0] };
    let roots = solve_quartic(&q);
    assert_eq!(roots.len(), 1);
    assert!((roots[0] - 2880.0).abs() < 1e-9);
}

#[test]
fn quartic_random_residuals() {
    let (_, a) = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let c = random_coeffs(&mut rng);
        let q = QuarticCoefficients::new(rng.random_range(1.1..20.0), rng.random_range(0.1..1e3), &c, a).unwrap();
        let p = q.polynomial();
        for r in solve_quartic(&q) {
            assert!(horner(&p, r).abs() <= ROOT_RESIDUAL * residual_scale(&p, r));
        }
    }
}

#[test]
fn users_at_reference_point() {
    let (c, a) = reference();
    let beta = 165.0 / 85.0;
    let rho_tot = 85.0 * 4.6097;
    let k = optimal_users(beta, rho_tot, &c, a).unwrap();
    let q = QuarticCoefficients::new(beta, rho_tot, &c, a).unwrap();
    let refined = refine_integer(k, |k| q.objective(f64::from(k)), 1..=5759).unwrap();
    assert!((82..=88).contains(&refined), "{refined}");
}

#[test]
fn users_match_integer_scan() {
    let (_, a) = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let c = random_coeffs(&mut rng);
        let beta = rng.random_range(1.2..10.0);
        let rho_tot = 10f64.powf(rng.random_range(0.0..3.0));
        let q = QuarticCoefficients::new(beta, rho_tot, &c, a).unwrap();
        let k = optimal_users(beta, rho_tot, &c, a).unwrap();
        let refined = refine_integer(k, |k| q.objective(f64::from(k)), 1..=5759).unwrap();
        let scan = (1..=5759u32).max_by(|&x, &y| q.objective(f64::from(x)).total_cmp(&q.objective(f64::from(y)))).unwrap();
        assert_eq!(refined, scan);
    }
}

#[test]
fn users_rejects_bad_inputs() {
    let (c, a) = reference();
    assert!(optimal_users(1.0, 10.0, &c, a).is_err());
    assert!(optimal_users(2.0, 0.0, &c, a).is_err());
}

#[test]
fn refinement_rules() {
    let peaked = |x: u32| -(f64::from(x) - 165.0).powi(2);
    assert_eq!(refine_integer(164.6, peaked, 1..=1000).unwrap(), 165);
    assert_eq!(refine_integer(42.0, peaked, 1..=1000).unwrap(), 42);
    assert_eq!(refine_integer(0.3, peaked, 5..=1000).unwrap(), 5);
    assert_eq!(refine_integer(2e9, peaked, 5..=1000).unwrap(), 1000);
    assert_eq!(refine_integer(10.5, |_| 1.0, 1..=100).unwrap(), 10);
    #[allow(clippy::reversed_empty_ranges)]
    let empty = 10..=5;
    assert_eq!(refine_integer(7.0, peaked, empty), Err(Error::EmptyRange));
}

#[test]
fn cross_consistency_at_joint_optimum() {
    let (c, a) = reference();
    // exhaustive joint optimum over the reference grid
    let mut best = DesignPoint { m: 0, k: 0, rho: 0.0, ee: -1.0 };
    for k in 1..=150u32 {
        for m in k + 1..=250 {
            let rho = optimal_power(m, k, &c, a).unwrap();
            let ee = ee_zf(m, k, rho, &c, a).unwrap();
            if ee > best.ee {
                best = DesignPoint { m, k, rho, ee };
            }
        }
    }
    let m = optimal_antennas(best.k, best.rho, &c, a).unwrap();
    let m = refine_integer(m, |m| ee_zf(m, best.k, best.rho, &c, a).unwrap(), best.k..=u32::MAX).unwrap();
    assert_eq!(m, best.m);
    let beta = f64::from(best.m) / f64::from(best.k);
    let q = QuarticCoefficients::new(beta, best.rho * f64::from(best.k), &c, a).unwrap();
    let k = optimal_users(beta, best.rho * f64::from(best.k), &c, a).unwrap();
    assert_eq!(refine_integer(k, |k| q.objective(f64::from(k)), 1..=5759).unwrap(), best.k);
    assert!((optimal_power(best.m, best.k, &c, a).unwrap() - best.rho).abs() <= 1e-4 * best.rho);
}

#[test]
fn unimodal_objectives() {
    let (c, a) = reference();
    let samples = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> usize {
        let v: Vec<f64> = (0..1000).map(|i| f(lo * (hi / lo).powf(f64::from(i) / 999.0))).collect();
        (1..999).filter(|&i| v[i] > v[i - 1] && v[i] > v[i + 1]).count()
    };
    let fm = |m: f64| ee_zf_relaxed(m, 85.0, 4.6, &c, a);
    assert_eq!(samples(&fm, 85.001, 1e6), 1);
    let fr = |r: f64| ee_zf_relaxed(165.0, 85.0, r, &c, a);
    assert_eq!(samples(&fr, 1e-6, 1e6), 1);
    let q = QuarticCoefficients::new(165.0 / 85.0, 391.8, &c, a).unwrap();
    let fk = |k: f64| q.objective(k);
    assert_eq!(samples(&fk, 1e-3, 5759.0), 1);
}

#[test]
fn stationary_derivatives() {
    let (c, a) = reference();
    let central = |f: &dyn Fn(f64) -> f64, x: f64| {
        let h = 1e-5 * x;
        (f(x + h) - f(x - h)) / (2.0 * h) * x / f(x)
    };
    let m = optimal_antennas(85, 4.6, &c, a).unwrap();
    assert!(central(&|m| ee_zf_relaxed(m, 85.0, 4.6, &c, a), m).abs() < 1e-6);
    let rho = optimal_power(165, 85, &c, a).unwrap();
    assert!(central(&|r| ee_zf_relaxed(165.0, 85.0, r, &c, a), rho).abs() < 1e-6);
    let q = QuarticCoefficients::new(2.0, 300.0, &c, a).unwrap();
    let k = optimal_users(2.0, 300.0, &c, a).unwrap();
    assert!(central(&|k| q.objective(k), k).abs() < 1e-6);
}

#[test]
fn closed_forms_reject_signed_coefficients() {
    let (_, a) = reference();
    let mrt = HardwareProfile::default().coefficients_for(crate::Precoding::MaximumRatio, 5760).unwrap();
    assert!(optimal_power(100, 10, &mrt, a).is_err());
    assert!(optimal_antennas(10, 1.0, &mrt, a).is_err());
    assert!(optimal_users(3.0, 10.0, &mrt, a).is_err());
    assert!(ee_zf(100, 10, 1.0, &mrt, a).unwrap() > 0.0);
}
