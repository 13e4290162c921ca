use bubble_tower::constants::*;
use bubble_tower::Error;
use num::{BigRational, One};
use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::PI;

/// `int_{R^N} (1+|x|^2)^{-m} dx`.
fn beta_integral(n: usize, m: f64) -> f64 {
    let h = n as f64 / 2.0;
    (h * PI.ln() + ln_gamma(m - h) - ln_gamma(m)).exp()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn dimension_seven_against_closed_forms() {
    let n = 7;
    let nf = n as f64;
    let c = compute_constants(n, 1e-12).unwrap();
    let alpha_sq = (nf * (nf - 2.0)).powf((nf - 2.0) / 2.0);
    let alpha_pow = (nf * (nf - 2.0)).powf(nf / 2.0);
    let p = (nf + 2.0) / (nf - 2.0);
    let a = (nf - 2.0) / 2.0;
    assert!(rel(c.kn_pow, alpha_pow * beta_integral(n, nf)) < 1e-10);
    assert!(rel(c.grad_sq, c.kn_pow) < 1e-8);
    assert!(rel(c.b_hat, 0.5 * alpha_sq * beta_integral(n, nf - 2.0)) < 1e-10);
    let sigma = 2.0 * PI.powf(nf / 2.0) / gamma(nf / 2.0);
    assert!(rel(c.c_hat, alpha_pow * sigma / nf) < 1e-10);
    // (1 - r^2)^2 = (1+r^2)^2 - 4 (1+r^2) + 4
    let c0 = p
        * nf
        * (nf - 2.0)
        * a
        * a
        * alpha_sq
        * (beta_integral(n, nf) - 4.0 * beta_integral(n, nf + 1.0) + 4.0 * beta_integral(n, nf + 2.0));
    assert!(rel(c.c0, c0) < 1e-10);
    assert_eq!(c.d_n_per_bubble, c.kn_pow / nf);
    assert!(c.b_n_rel_dev < 1e-10);
    assert!(c.convention_note.contains("SphereAbove"));
}

#[test]
fn frozen_regression_values() {
    let frozen = [
        (7, 6.434375790223e4, 9.048340955000e4),
        (8, 6.155809254647e5, 1.025968209108e6),
        (9, 6.227742236170e6, 1.198840380463e7),
        (10, 6.632045655452e7, 1.446991779371e8),
        (11, 7.403065702226e8, 1.804497264918e9),
        (12, 8.630028709081e9, 2.323469267830e10),
    ];
    for (n, kn, c0) in frozen {
        let c = compute_constants(n, 1e-12).unwrap();
        assert!(rel(c.kn_pow, kn) < 1e-11 && rel(c.c0, c0) < 1e-11, "N = {n}");
    }
}

#[test]
fn positivity_and_growth() {
    // kn_pow = int U^{p+1} grows with N in this normalisation
    let mut last = 0.0;
    for n in 7..=12 {
        let c = compute_constants(n, 1e-10).unwrap();
        for v in [c.kn_pow, c.c0, c.a_n, c.b_n, c.c_n, c.d_n_per_bubble, c.b_hat, c.c_hat] {
            assert!(v > 0.0);
        }
        assert!(c.kn_pow > last);
        last = c.kn_pow;
    }
    assert!(matches!(compute_constants(6, 1e-10), Err(Error::DimensionTooLow { .. })));
}

#[test]
fn interaction_prefactor_report() {
    let ip = interaction_prefactor(7, 1e-12).unwrap();
    assert!(ip.with_alpha > 0.0 && ip.without_alpha > 0.0);
    let alpha = 35f64.powf(1.25);
    assert!(rel(ip.with_alpha, alpha * ip.without_alpha) < 1e-12);
    assert_eq!(ip.kn_convention, Some(OmegaConvention::SphereAbove));
    assert!(ip.matched.is_none());
    assert!((ip.closed_form_ratio.unwrap() - 2.0).abs() < 1e-9);
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn schedule_tables() {
    let s = exponent_schedule(7, 3).unwrap();
    assert_eq!(s.gamma, vec![q(1, 2), q(9, 2), q(49, 2)]);
    assert_eq!(s.theta, vec![q(2, 1), q(10, 1), q(50, 1)]);
    let s = exponent_schedule(10, 3).unwrap();
    assert_eq!(s.gamma, vec![q(1, 2), q(3, 2), q(7, 2)]);
    assert_eq!(s.theta_f64(), vec![2.0, 4.0, 8.0]);
    assert!(matches!(exponent_schedule(6, 2), Err(Error::DimensionTooLow { .. })));
}

#[test]
fn exact_identities() {
    let two = q(2, 1);
    for n in 7..=20 {
        let s = exponent_schedule(n, 10).unwrap();
        assert!(s.identities_hold());
        let ratio = q(n as i64 - 2, 2);
        assert_eq!(q(4, 1) * &s.gamma[0], BigRational::one() + &two * &s.gamma[0]);
        for l in 0..10 {
            assert_eq!(s.theta[l], BigRational::one() + &two * &s.gamma[l]);
            if l > 0 {
                assert_eq!((&s.gamma[l] - &s.gamma[l - 1]) * &ratio, s.theta[l]);
                assert!(s.theta[l] > s.theta[l - 1] && s.gamma[l] > s.gamma[l - 1]);
            }
        }
    }
}
