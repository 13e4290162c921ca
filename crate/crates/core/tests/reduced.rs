use bubble_tower::constants::compute_constants;
use bubble_tower::reduced::*;
use bubble_tower::scaled::Scaled;
use bubble_tower::Error;
use proptest::prelude::*;

fn model(dim: usize, k: usize, weyl_sq: f64) -> ReducedModel {
    ReducedModel::new(&compute_constants(dim, 1e-10).unwrap(), k, weyl_sq, InteractionSource::ClosedForm).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn below(a: Scaled, b: Scaled) -> bool {
    (a - b).signum() < 0.0
}

#[test]
fn first_level_function() {
    let m = model(7, 1, 1.0);
    assert!(g1(&m, 1e-12).abs() < 1e-18);
    let flat = model(7, 1, 0.0);
    assert_eq!(g1(&flat, 3.0), flat.b * 9.0);
    assert!(matches!(maximize_sequential(&flat), Err(Error::DegenerateWeyl(_))));
    let d_star = (m.b / (2.0 * m.a * m.weyl_sq)).sqrt();
    assert!(rel(ln_first_height(&m).unwrap().exp(), d_star) < 1e-14);
    for f in [0.9, 1.1] {
        assert!(g1(&m, d_star) > g1(&m, f * d_star));
    }
    let h = 1e-5 * d_star;
    assert!(((g1(&m, d_star + h) - g1(&m, d_star - h)) / (2.0 * h)).abs() < 1e-6 * m.b * d_star);
}

#[test]
fn higher_level_function() {
    let m = model(7, 2, 1.0);
    assert!(g_ell(&m, 1.0, 1e-9).abs() < 1e-10);
    let (lambda, dp, d) = (3.0f64, 0.7f64, 1.3f64);
    let expect = -m.c * (d / dp).powf(2.5) + m.b * lambda * lambda * d * d;
    assert!(rel(g_ell(&m, lambda * dp, lambda * d), expect) < 1e-13);
    assert!(g_ell(&m, 1.0, 1e6) < -1e12);
    let s = g_level_scaled(&m, 2, dp.ln(), d.ln());
    assert!(rel(s.to_f64(), g_ell(&m, dp, d)) < 1e-13);
}

#[test]
fn stationarity_of_next_height() {
    // G_l' = 0  <=>  (e - 2) ln d = ln(2B / (C e)) + e ln d_prev
    for n in [7usize, 9, 11] {
        let m = model(n, 2, 1.0);
        let e = m.interaction_power();
        for ln_prev in [-3.0, 0.0, 2.5] {
            let oracle = ((2.0 * m.b / (m.c * e)).ln() + e * ln_prev) / (e - 2.0);
            assert!((ln_next_height(&m, ln_prev) - oracle).abs() < 1e-12 * oracle.abs().max(1.0));
        }
    }
}

#[test]
fn interaction_scaling_of_heights() {
    let m = model(9, 2, 1.0);
    for lambda in [0.1, 4.0] {
        let scaled = ReducedModel::from_parts(m.dim, m.k, m.a, m.b, lambda * m.c, m.d, m.weyl_sq).unwrap();
        let shift = ln_next_height(&scaled, 0.4) - ln_next_height(&m, 0.4);
        assert!((shift - 2.0 / (6.0 - 9.0) * lambda.ln()).abs() < 1e-12);
    }
}

#[test]
fn closed_form_matches_oracle() {
    for n in [7usize, 9, 11] {
        for k in 1..=5 {
            let m = model(n, k, 1.0);
            let (d, rep) = maximize_sequential(&m).unwrap();
            assert_eq!(d.len(), k);
            assert!(rep.max_rel_diff <= 1e-8, "N = {n}, k = {k}: {}", rep.max_rel_diff);
            assert!(rep.all_concave);
            for lv in &rep.levels {
                assert!(lv.second_derivative < 0.0 && lv.g_max.signum() > 0.0);
            }
        }
    }
}

#[test]
fn oracle_on_a_known_quadratic() {
    let f = |u: f64| twofloat::TwoFloat::from(-(u - 0.3) * (u - 0.3));
    assert!((golden_section_max(f, 1e-6, 1e3, ORACLE_WIDTH) - 0.3).abs() < 1e-9);
}

#[test]
fn argmax_invariance() {
    let m = model(9, 4, 0.7);
    let (d0, _) = maximize_sequential(&m).unwrap();
    for lambda in [1e-3, 2.0, 1e5] {
        let (d1, _) = maximize_sequential(&m.rescaled(lambda)).unwrap();
        for (a, b) in d0.iter().zip(&d1) {
            assert!(rel(*b, *a) < 1e-10);
        }
    }
}

#[test]
fn coercivity_at_grid_extremes() {
    let m = model(7, 3, 1.0);
    let (d, rep) = maximize_sequential(&m).unwrap();
    for l in 1..3 {
        let top = rep.levels[l].g_max;
        let (ln_prev, ln_star) = (d[l - 1].ln(), d[l].ln());
        let near_zero = g_level_scaled(&m, l + 1, ln_prev, ln_star + (1e-8f64).ln());
        assert!(near_zero.abs().ln_abs() < top.ln_abs() + (1e-12f64).ln());
        let far = g_level_scaled(&m, l + 1, ln_prev, ln_star + (1e4f64).ln());
        assert!(far.signum() < 0.0 && far.ln_abs() > top.ln_abs() + 10.0);
    }
}

#[test]
fn model_energy() {
    let m = model(7, 1, 1.0);
    let e = reduced_energy_model(&m, &[0.8], 1e-2).unwrap();
    assert!(rel(e.total, m.d + 1e-4 * g1(&m, 0.8)) < 1e-14);
    let tiny = reduced_energy_model(&m, &[0.8], 1e-30).unwrap();
    assert_eq!(tiny.total, m.d);
    let m2 = model(7, 2, 1.0);
    let e = reduced_energy_model(&m2, &[0.8, 1.7], 1e-3).unwrap();
    assert!(rel(e.terms[1].to_f64() / 1e-30, g_ell(&m2, 0.8, 1.7)) < 1e-12);
    assert_eq!(e.terms.len(), 2);
    assert!(matches!(reduced_energy_model(&m2, &[0.8, -1.0], 1e-3), Err(Error::NonPositiveValue(1))));
    assert!(reduced_energy_model(&m2, &[0.8], 1e-3).is_err());
}

#[test]
fn hessian_examples() {
    let m = model(7, 3, 1.0);
    let (d, _) = maximize_sequential(&m).unwrap();
    let (negdef, eig) = hessian_check(&m, &d, 1e-3, 1e-3).unwrap();
    assert!(negdef && eig.max < 0.0, "{eig:?}");
    assert_eq!(eig.eigenvalues.len(), 3);

    // Doubling d_1 leaves G_1'' negative; the mixed term from G_2 then
    // produces a positive direction.
    let m2 = model(7, 2, 1.0);
    let (d2, _) = maximize_sequential(&m2).unwrap();
    let d1 = 2.0 * d2[0];
    assert!(-12.0 * m2.a * m2.weyl_sq * d1 * d1 + 2.0 * m2.b < 0.0);
    let (negdef, eig) = hessian_check(&m2, &[d1, d2[1]], 1e-3, 1e-3).unwrap();
    assert!(!negdef && eig.max > 0.0 && eig.min < 0.0);

    // One level: the sign is that of G_1''.
    let m1 = model(7, 1, 1.0);
    let (d1, _) = maximize_sequential(&m1).unwrap();
    for (f, expect) in [(1.0, true), (0.5, false), (2.0, true)] {
        let x = f * d1[0];
        let g2 = -12.0 * m1.a * m1.weyl_sq * x * x + 2.0 * m1.b;
        let (negdef, eig) = hessian_check(&m1, &[x], 1e-3, 1e-3).unwrap();
        assert_eq!(negdef, expect);
        assert_eq!(eig.max < 0.0, g2 < 0.0);
    }

    assert!(matches!(hessian_check(&m, &d, 1e-3, 1e-7), Err(Error::StepTooSmall(_))));
    assert!(hessian_check(&m, &d, 2.0, 1e-3).is_err());
}

#[test]
fn quadrature_interaction_source() {
    let c = compute_constants(7, 1e-10).unwrap();
    let m = ReducedModel::new(&c, 2, 1.0, InteractionSource::Quadrature).unwrap();
    assert_eq!(m.c, c.c_hat);
    let (_, rep) = maximize_sequential(&m).unwrap();
    assert!(rep.max_rel_diff <= 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn sequential_optimality(n in prop::sample::select(vec![7usize, 9, 11]), level in 1usize..5, shift in -3.0..3.0f64) {
        prop_assume!(shift.abs() > 1e-3);
        let m = model(n, 5, 1.3);
        let (d, _) = maximize_sequential(&m).unwrap();
        let ln_prev = if level == 1 { 0.0 } else { d[level - 2].ln() };
        let ln_star = d[level - 1].ln();
        let at_star = g_level_scaled(&m, level, ln_prev, ln_star);
        let probe = g_level_scaled(&m, level, ln_prev, ln_star + shift);
        prop_assert!(below(probe, at_star));
    }
}
