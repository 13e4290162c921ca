use bubble_tower::bubble::BubbleProfile;
use bubble_tower::quadrature::*;
use bubble_tower::Error;
use proptest::prelude::*;
use statrs::function::gamma::gamma;
use std::cell::Cell;
use std::f64::consts::PI;

fn whole<F: Fn(f64) -> f64>(f: F, decay: f64, dim: usize, tol: f64) -> f64 {
    integrate_radial(&RadialIntegrand::new(f, decay), RadialInterval::whole_space(), dim, tol).unwrap().value
}

#[test]
fn planar_rational_integrand() {
    let v = whole(|r| (1.0 + r * r).powi(-2), 4.0, 2, 1e-12);
    assert!((v - PI).abs() < 1e-11 * PI);
}

#[test]
fn unit_ball_volume() {
    let q = integrate_radial(&RadialIntegrand::compact(|_| 1.0), RadialInterval::ball(1.0).unwrap(), 3, 1e-12).unwrap();
    assert!((q.value - 4.0 * PI / 3.0).abs() < 1e-12);
    assert!(q.evaluations > 0 && q.abs_error_estimate >= 0.0);
}

#[test]
fn beta_function_closed_form() {
    // int (1+|x|^2)^{-p} dx = pi^{N/2} Gamma(p - N/2) / Gamma(p)
    let expect = PI.powf(3.5) * gamma(3.5) / gamma(7.0);
    let v = whole(|r| (1.0 + r * r).powi(-7), 14.0, 7, 1e-12);
    assert!((v - expect).abs() < 1e-11 * expect, "{v} vs {expect}");
}

#[test]
fn slow_decay_is_rejected() {
    let f = RadialIntegrand::new(|r: f64| (1.0 + r * r).powf(-1.5), 3.0);
    assert!(matches!(integrate_radial(&f, RadialInterval::whole_space(), 3, 1e-8), Err(Error::NonIntegrable { .. })));
    // the same decay over a bounded shell is fine
    assert!(integrate_radial(&f, RadialInterval::ball(5.0).unwrap(), 3, 1e-8).is_ok());
}

#[test]
fn exhausted_budget_reports_best_estimate() {
    let f = RadialIntegrand::compact(|r: f64| (1.0 / r).sin() / r.sqrt());
    match integrate_radial(&f, RadialInterval::ball(1.0).unwrap(), 2, 1e-15) {
        Err(Error::ToleranceNotReached { value, evaluations, .. }) => {
            assert!(value.is_finite() && evaluations > 0)
        }
        other => panic!("expected a flagged estimate, got {other:?}"),
    }
}

#[test]
fn critical_norm_of_the_bubble() {
    let n = 7;
    let prof = BubbleProfile::new(n).unwrap();
    let q = 2.0 * n as f64 / (n as f64 - 2.0);
    let kn_pow = whole(|r| prof.value(r).powf(prof.p + 1.0), 14.0, n, 1e-12);
    let profile = |r: f64| prof.value(r);
    let f = ShellFunction::Radial { profile: &profile, decay_power: 5.0 };
    let norm = lq_norm_shell(&f, RadialInterval::whole_space(), q, n, 1e-12).unwrap();
    let expect = kn_pow.powf((n as f64 - 2.0) / (2.0 * n as f64));
    assert!((norm - expect).abs() < 1e-10 * expect);
    // scale invariance of the critical norm
    for mu in [0.01f64, 3.0, 40.0] {
        let scaled = |r: f64| mu.powf(-prof.a) * prof.value(r / mu);
        let fs = ShellFunction::Radial { profile: &scaled, decay_power: 5.0 };
        let v = lq_norm_shell(&fs, RadialInterval::whole_space(), q, n, 1e-12).unwrap();
        assert!((v - expect).abs() < 1e-9 * expect, "mu = {mu}: {v}");
    }
}

#[test]
fn zero_function_has_zero_norm() {
    let zero = |_: f64| 0.0;
    let f = ShellFunction::Radial { profile: &zero, decay_power: f64::INFINITY };
    assert_eq!(lq_norm_shell(&f, RadialInterval::new(1.0, 2.0).unwrap(), 2.0, 5, 1e-10).unwrap(), 0.0);
}

#[test]
fn monomial_norm_matches_direct_cubature() {
    // |x_1 e^{-r^2}|_{2} in R^2: int x_1^2 e^{-2 r^2} dx = pi / 8
    let g = |r: f64| (-r * r).exp();
    let f = ShellFunction::RadialMonomial { profile: &g, decay_power: f64::INFINITY, alpha: &[1] };
    let v = lq_norm_shell(&f, RadialInterval::ball(12.0).unwrap(), 2.0, 2, 1e-12).unwrap();
    assert!((v - (PI / 8.0).sqrt()).abs() < 1e-10);
}

#[test]
fn moment_reductions() {
    let g = RadialIntegrand::new(|r: f64| (1.0 + r * r).powi(-8), 16.0);
    let dom = RadialInterval::whole_space();
    let n = 7;
    assert_eq!(moment_integral(&g, &[1, 1], dom, n, 1e-10).unwrap(), 0.0);
    let second = moment_integral(&g, &[2], dom, n, 1e-10).unwrap();
    let r2 = whole(|r| r * r * (1.0 + r * r).powi(-8), 14.0, n, 1e-12);
    assert!((second - r2 / n as f64).abs() < 1e-10 * second);
    let x4 = moment_integral(&g, &[4], dom, n, 1e-10).unwrap();
    let x2y2 = moment_integral(&g, &[2, 2], dom, n, 1e-10).unwrap();
    assert!((x4 / x2y2 - 3.0).abs() < 1e-12);
    assert!(matches!(moment_integral(&g, &[2, 2, 1], dom, n, 1e-10), Err(Error::UnsupportedDegree(5))));
}

#[test]
fn moment_ratio_by_planar_cubature() {
    // direct 2-D quadrature over the unit disc in polar form
    let g = |r: f64| (1.0 - r * r).powi(2);
    let angular =
        |m: i32, k: i32| adaptive(|t: f64| t.cos().powi(m) * t.sin().powi(k), 0.0, 2.0 * PI, 1e-13, 8).unwrap().value;
    let radial = adaptive(|r: f64| r.powi(5) * g(r), 0.0, 1.0, 1e-13, 4).unwrap().value;
    let direct_ratio = (angular(4, 0) * radial) / (angular(2, 2) * radial);
    let gi = RadialIntegrand::compact(g);
    let dom = RadialInterval::ball(1.0).unwrap();
    let ratio =
        moment_integral(&gi, &[4], dom, 2, 1e-12).unwrap() / moment_integral(&gi, &[2, 2], dom, 2, 1e-12).unwrap();
    assert!((ratio - direct_ratio).abs() < 1e-10);
    assert!((ratio - 3.0).abs() < 1e-10);
}

#[test]
fn odd_moments_skip_quadrature() {
    let calls = Cell::new(0usize);
    let g = RadialIntegrand::new(
        |r: f64| {
            calls.set(calls.get() + 1);
            (1.0 + r * r).powi(-6)
        },
        12.0,
    );
    for alpha in [[1u32, 0, 0], [3, 0, 0], [1, 2, 0], [2, 1, 1], [1, 1, 2]] {
        assert_eq!(moment_integral(&g, &alpha, RadialInterval::whole_space(), 5, 1e-10).unwrap(), 0.0);
    }
    assert_eq!(calls.get(), 0);
}

#[test]
fn deterministic() {
    let f = RadialIntegrand::new(|r: f64| (1.0 + r).powf(-9.3) * (3.0 * r).cos().powi(2), 9.3);
    let a = integrate_radial(&f, RadialInterval::whole_space(), 6, 1e-10).unwrap();
    let b = integrate_radial(&f, RadialInterval::whole_space(), 6, 1e-10).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.evaluations, b.evaluations);
}

fn test_family(c: f64, s: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| (1.0 + c * r * r).powf(-s) * (1.0 + 0.5 * r * r / (1.0 + r * r) + (-(r - c).powi(2)).exp())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn linearity(a in -3.0..3.0f64, b in -3.0..3.0f64, c1 in 0.2..4.0f64, c2 in 0.2..4.0f64) {
        let tol = 1e-10;
        let (f, h) = (test_family(c1, 5.0), test_family(c2, 6.0));
        let lhs = whole(|r| a * f(r) + b * h(r), 10.0, 5, tol);
        let rhs = a * whole(&f, 10.0, 5, tol) + b * whole(&h, 12.0, 5, tol);
        let scale = a.abs() * whole(&f, 10.0, 5, tol).abs() + b.abs() * whole(&h, 12.0, 5, tol).abs();
        prop_assert!((lhs - rhs).abs() <= 2.0 * tol * scale + 1e-14);
    }

    #[test]
    fn shell_additivity(c in 0.05..20.0f64, k in 0.3..3.0f64) {
        let tol = 1e-10;
        let f = test_family(k, 4.5);
        let g = RadialIntegrand::new(&f, 9.0);
        let inner = integrate_radial(&g, RadialInterval::ball(c).unwrap(), 6, tol).unwrap().value;
        let outer = integrate_radial(&g, RadialInterval::new(c, f64::INFINITY).unwrap(), 6, tol).unwrap().value;
        let total = integrate_radial(&g, RadialInterval::whole_space(), 6, tol).unwrap().value;
        prop_assert!((inner + outer - total).abs() <= 2.0 * tol * total.abs(), "{inner} {outer} {total}");
    }

    #[test]
    fn scale_covariance(log_mu in -3.0..3.0f64) {
        let mu = 10f64.powf(log_mu);
        let tol = 1e-10;
        let f = test_family(1.0, 5.0);
        let scaled = whole(|r| f(r / mu), 10.0, 7, tol);
        let base = whole(&f, 10.0, 7, tol);
        prop_assert!((scaled / (mu.powi(7) * base) - 1.0).abs() <= 10.0 * tol, "{mu} {scaled} {base}");
    }
}
