//! Property tests for the depreciation closed forms, checked against
//! brute-force series sums.

use corptax_core::taxcode::*;
use proptest::prelude::*;

/// Direct summation of `sum_j beta^j d (1 - d)^j`, stopping once terms drop below 1e-15.
fn discounted_series(d: f64, beta: f64) -> f64 {
    let mut total = 0.0;
    let mut term = d;
    while term > 1e-15 {
        total += term;
        term *= beta * (1.0 - d);
    }
    total
}

/// Undiscounted partial sums of the deduction weights.
fn weight_sum(d: f64) -> f64 {
    let mut total = 0.0;
    let mut term = d;
    while term > 1e-17 {
        total += term;
        term *= 1.0 - d;
    }
    total
}

proptest! {
    #[test]
    fn weights_sum_to_one(d in 1e-3f64..=1.0) {
        prop_assert!((weight_sum(d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schedule_weights_are_nonnegative(d in 1e-3f64..=1.0, j in 0u32..200) {
        let s = DepreciationSchedule::new(d).unwrap();
        prop_assert!(s.weight(j) >= 0.0);
    }

    #[test]
    fn pdv_matches_series(d in 1e-3f64..=1.0, beta in 0.5f64..0.999) {
        let closed = pdv_of_schedule(d, beta).unwrap();
        prop_assert!((closed - discounted_series(d, beta)).abs() < 1e-10);
        prop_assert!(closed > 0.0 && closed <= 1.0);
    }

    #[test]
    fn steady_lambda_matches_series(d in 1e-3f64..=1.0, beta in 0.5f64..0.999) {
        let lam = steady_state_lambda(d, beta).unwrap();
        prop_assert!((lam - discounted_series(d, beta)).abs() < 1e-10);
    }

    #[test]
    fn wedge_decreasing_in_rate(lam in 0.0f64..0.999, t1 in 0.0f64..0.98, dt in 1e-4f64..0.01) {
        prop_assert!(wedge(t1 + dt, lam) < wedge(t1, lam));
    }

    #[test]
    fn wedge_increasing_in_lambda(tau in 0.01f64..0.99, l1 in 0.0f64..0.99, dl in 1e-4f64..0.01) {
        prop_assert!(wedge(tau, l1 + dl) > wedge(tau, l1));
    }

    #[test]
    fn full_expensing_is_neutral(tau in 0.0f64..0.999, beta in 0.5f64..0.999, alpha in 0.05f64..0.95) {
        let r = wedge_report(tau, 1.0, beta, alpha).unwrap();
        prop_assert_eq!(r.lambda_ss, 1.0);
        prop_assert_eq!(r.wedge, 1.0);
        prop_assert_eq!(r.distortion, 0.0);
    }

    #[test]
    fn wedge_in_unit_interval(tau in 0.0f64..0.999, d in 0.0f64..=1.0, beta in 0.5f64..0.999) {
        let r = wedge_report(tau, d, beta, 0.35).unwrap();
        prop_assert!(r.wedge > 0.0 && r.wedge <= 1.0);
        prop_assert!(r.lambda_ss >= 0.0 && r.lambda_ss <= 1.0);
        prop_assert!((r.distortion - (1.0 - r.wedge.powf(0.35 / 0.65))).abs() < 1e-15);
    }

    #[test]
    fn bonus_is_convex_combination(b in 0.0f64..=1.0, x in 0.0f64..=1.0) {
        let v = apply_bonus(b, x).unwrap();
        prop_assert!(v >= x - 1e-15 && v <= 1.0 + 1e-15);
    }
}

#[test]
fn round_trip_on_grid() {
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let d = 0.01 + 0.99 * i as f64 / 9.0;
            let beta = 0.80 + 0.19 * j as f64 / 9.0;
            let back = rate_from_pdv(pdv_of_schedule(d, beta).unwrap(), beta).unwrap();
            worst = worst.max((back - d).abs());
        }
    }
    assert!(worst < 1e-12, "round-trip error {worst:e}");
}

#[test]
fn zero_rate_schedule_rejected_in_dynamics() {
    assert!(DepreciationSchedule::new(0.0).is_err());
    assert!(pdv_of_schedule(0.0, 0.94).is_err());
    assert_eq!(wedge_report(0.35, 0.0, 0.94, 0.35).unwrap().wedge, 0.65);
}

#[test]
fn no_tax_means_no_distortion() {
    for p in distortion_grid(Axis::new(0.0, 0.5, 3), Axis::new(0.0, 1.0, 5), 0.35).unwrap() {
        if p.tau == 0.0 {
            assert_eq!(p.distortion, 0.0);
        }
    }
}
