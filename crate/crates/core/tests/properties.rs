mod common;

use cocycle_core::cocycle::{golden_mean, lyapunov_exponent, rational_approximation, transfer_matrix, CocycleSpec};
use cocycle_core::jensen::{acceleration_functional, jensen_integral, jensen_integral_quadrature};
use cocycle_core::zeros::laurent_roots;
use cocycle_core::{par, FourierPotential};
use common::random_real_trig;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn potential(seed: u64) -> FourierPotential {
    random_real_trig(&mut ChaCha8Rng::seed_from_u64(seed), 4)
}

fn zero_heights(p: &FourierPotential, mu: f64) -> Vec<f64> {
    laurent_roots(p, Complex64::new(mu, 0.0)).unwrap().all_zeros().map(|z| z.height()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transfer_matrices_are_unimodular(seed in 0u64..1000, lambda in -50.0..50.0f64, e in -50.0..50.0f64,
                                         x in 0.0..1.0f64, y in -0.5..0.5f64) {
        let c = CocycleSpec::new(potential(seed), golden_mean(), lambda, e, y).unwrap();
        let m = transfer_matrix(&c, x).unwrap();
        prop_assert!((m.det() - 1.0).norm() < 1e-12);
        prop_assert!(m.norm() >= 1.0 - 1e-12);
    }

    #[test]
    fn jensen_integral_is_even_and_convex(seed in 0u64..1000, mu in -1.0..1.0f64, y in 0.0..0.4f64) {
        let p = potential(seed);
        let m = Complex64::new(mu, 0.0);
        let i = |y: f64| jensen_integral(&p, m, y).unwrap();
        prop_assert!((i(y) - i(-y)).abs() < 1e-10);
        let d = 0.04;
        prop_assert!(i(y) <= 0.5 * (i(y - d) + i(y + d)) + 1e-10);
    }

    #[test]
    fn quadrature_agrees_away_from_zero_heights(seed in 0u64..1000, mu in -1.0..1.0f64, y in -0.45..0.45f64) {
        let p = potential(seed);
        prop_assume!(zero_heights(&p, mu).iter().all(|t| (t - y).abs() >= 6e-3));
        let m = Complex64::new(mu, 0.0);
        let q = jensen_integral_quadrature(&p, m, y, 1024).unwrap();
        prop_assert!((q - jensen_integral(&p, m, y).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn acceleration_forms_coincide(seed in 0u64..1000, mu in -1.0..1.0f64, y in 0.0..0.45f64) {
        let p = potential(seed);
        prop_assume!(zero_heights(&p, mu).iter().all(|t| (t.abs() - y).abs() >= 1e-3));
        let v = acceleration_functional(&p, Complex64::new(mu, 0.0), y).unwrap();
        prop_assert_eq!(v.two_omega, v.two_omega_winding);
        prop_assert!(v.fd_ok());
        prop_assert!(v.two_omega >= 0);
    }

    #[test]
    fn rationals_are_recognized(p in 1u64..200, q in 2u64..200) {
        prop_assume!(p < q);
        let g = gcd(p, q);
        prop_assert_eq!(rational_approximation(p as f64 / q as f64, 1e-12, 1_000_000), Some((p / g, q / g)));
    }

    #[test]
    fn potentials_round_trip_through_serde(seed in 0u64..1000) {
        let p = potential(seed);
        let text = serde_json::to_string(&p).unwrap();
        let back: FourierPotential = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(p, back);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn finite_exponents_are_nonnegative(seed in 0u64..1000, lambda in -4.0..4.0f64, e in -5.0..5.0f64,
                                        y in -0.4..0.4f64) {
        let c = CocycleSpec::new(potential(seed), golden_mean(), lambda, e, y).unwrap();
        let l = lyapunov_exponent(&c, 1000, 32).unwrap();
        prop_assert!(l.raw_pairs.0 >= 0.0 && l.raw_pairs.1 >= 0.0);
        prop_assert!((l.spread - (l.raw_pairs.0 - l.raw_pairs.1).abs()).abs() < 1e-12);
    }

    #[test]
    fn profile_minimum_is_on_the_real_axis(seed in 0u64..1000, lambda in 0.5..4.0f64, y in 0.05..0.4f64) {
        let c = CocycleSpec::new(potential(seed), golden_mean(), lambda, 0.0, 0.0).unwrap();
        let at = |y: f64| lyapunov_exponent(&c.at_height(y).unwrap(), 1000, 64).unwrap().value;
        let (l0, lp, lm) = (at(0.0), at(y), at(-y));
        prop_assert!((lp - lm).abs() < 1e-4);
        prop_assert!(lp >= l0 - 1e-3);
    }
}

#[test]
fn worker_count_does_not_change_exponents() {
    let c = CocycleSpec::new(FourierPotential::bichromatic(), golden_mean(), 3.0, 0.4, 0.1).unwrap();
    let one = par::with_workers(Some(1), || lyapunov_exponent(&c, 2000, 64).unwrap());
    let two = par::with_workers(Some(2), || lyapunov_exponent(&c, 2000, 64).unwrap());
    assert_eq!(one.value.to_bits(), two.value.to_bits());
    assert_eq!(one.spread.to_bits(), two.spread.to_bits());
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}
