//! Randomized properties of the scalar functions and the bound.

use proptest::prelude::*;
use tfwd_core::bounds::{lower_bound, solve_s0};
use tfwd_core::model::{ModelParams, DEFAULT_LAMBDA};
use tfwd_core::specfun::{big_f, big_f_inverse, ttf, x};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn f_inverse_round_trips(e in -6.0f64..6.0) {
        let t = 10f64.powf(e);
        let back = big_f_inverse(big_f(t));
        prop_assert!((back - t).abs() <= 1e-9 * t, "t = {t}, back = {back}");
    }

    #[test]
    fn big_f_is_increasing(e in -6.0f64..6.0, step in 1e-3f64..1.0) {
        let t = 10f64.powf(e);
        prop_assert!(big_f(t * (1.0 + step)) > big_f(t));
    }

    #[test]
    fn kinetic_density_is_nonnegative(e in -4.0f64..4.0) {
        prop_assert!(ttf(10f64.powf(e)) >= 0.0);
    }

    // X changes sign at large t; near 0 it behaves like 2 t^4.
    #[test]
    fn exchange_density_is_quartic_near_zero(e in -4.0f64..-1.0) {
        let t = 10f64.powf(e);
        let r = x(t) / t.powi(4);
        prop_assert!(r > 1.9 && r <= 2.0, "X/t^4 = {r}");
    }

    #[test]
    fn s0_increases_with_kappa(e in -3.0f64..2.0, step in 0.01f64..0.5) {
        // Compared through arsinh: s0 itself overflows f64 beyond kappa ~ 57.
        let k = 10f64.powf(e);
        let a = solve_s0(k, 1.0).unwrap().asinh_s0;
        let b = solve_s0(k * (1.0 + step), 1.0).unwrap().asinh_s0;
        prop_assert!(b > a);
    }

    #[test]
    fn bound_is_affine_in_n(z in 1.0f64..50.0, kappa in 0.05f64..5.0, n in 0.0f64..100.0) {
        let p = ModelParams::new(z, z / (kappa * DEFAULT_LAMBDA.sqrt()), DEFAULT_LAMBDA).unwrap();
        let b0 = lower_bound(&p, 0.0, 1.0, 1.0).unwrap();
        let bn = lower_bound(&p, n, 1.0, 1.0).unwrap();
        let slope = -b0.xi * p.c;
        let expect = b0.bound_value + slope * n;
        prop_assert!((bn.bound_value - expect).abs() <= 1e-12 * expect.abs().max(1.0));
    }
}
