use bubble_tower::bubble::*;
use bubble_tower::Error;
use proptest::prelude::*;

fn value(b: &Bubble, x: &[f64]) -> f64 {
    match bubble_eval(b, x, Order::Value).unwrap() {
        BubbleOutput::Value(v) => v,
        _ => unreachable!(),
    }
}

#[test]
fn value_at_centre() {
    let v = value(&Bubble::standard(7), &[0.0; 7]);
    let expect = 35f64.powf(1.25);
    assert!((v - expect).abs() < 1e-13 * expect);
}

#[test]
fn scaling_identity() {
    let n = 7;
    for (mu, x) in [(0.3, [0.1, -0.2, 0.0, 0.5, 1.0, 0.0, 0.0]), (5.0, [3.0, 1.0, -2.0, 0.0, 0.0, 0.0, 4.0])] {
        let b = Bubble { dim: n, mu, center: vec![0.0; n] };
        let z: Vec<f64> = x.iter().map(|v| v / mu).collect();
        let expect = mu.powf(-2.5) * value(&Bubble::standard(n), &z);
        assert!((value(&b, &x) - expect).abs() < 1e-13 * expect);
    }
}

#[test]
fn critical_equation_on_axis() {
    let mut x = [0.0; 7];
    x[0] = 1.0;
    let (lap, up) = Bubble::standard(7).critical_terms(&x).unwrap();
    assert!((lap + up).abs() < 1e-12 * up);
}

#[test]
fn gradient_and_hessian_against_differences() {
    let b = Bubble { dim: 5, mu: 0.7, center: vec![0.1, 0.0, -0.3, 0.2, 0.0] };
    let x = [0.4, -0.1, 0.3, 0.9, -0.5];
    let BubbleOutput::Gradient(g) = bubble_eval(&b, &x, Order::Gradient).unwrap() else { panic!() };
    let BubbleOutput::Hessian(h) = bubble_eval(&b, &x, Order::Hessian).unwrap() else { panic!() };
    let step = 1e-4;
    for i in 0..5 {
        let shifted = |t: f64| {
            let mut y = x;
            y[i] += t;
            y
        };
        let fd = (value(&b, &shifted(step)) - value(&b, &shifted(-step))) / (2.0 * step);
        assert!((fd - g[i]).abs() < 1e-6 * g.amax());
        let BubbleOutput::Gradient(gp) = bubble_eval(&b, &shifted(step), Order::Gradient).unwrap() else { panic!() };
        let BubbleOutput::Gradient(gm) = bubble_eval(&b, &shifted(-step), Order::Gradient).unwrap() else { panic!() };
        for j in 0..5 {
            assert!(((gp[j] - gm[j]) / (2.0 * step) - h[(j, i)]).abs() < 1e-6 * h.amax());
        }
    }
    assert_eq!(h, h.transpose());
}

#[test]
fn kernel_values_and_parity() {
    let prof = BubbleProfile::new(7).unwrap();
    let psi0 = kernel_eval(KernelElement::new(7, 0).unwrap(), &[0.0; 7]).unwrap();
    assert!((psi0 - 2.5 * prof.alpha).abs() < 1e-12 * psi0);
    let x = [0.3, -1.2, 0.5, 0.0, 2.0, -0.7, 0.1];
    for i in 1..=7 {
        let k = KernelElement::new(7, i).unwrap();
        for c in 0..7 {
            let mut y = x;
            y[c] = -y[c];
            let sign = if c == i - 1 { -1.0 } else { 1.0 };
            assert_eq!(kernel_eval(k, &y).unwrap(), sign * kernel_eval(k, &x).unwrap());
        }
    }
    assert!(matches!(KernelElement::new(7, 8), Err(Error::IndexOutOfRange { .. })));
}

#[test]
fn kernel_is_radial_and_decays() {
    let k = KernelElement::new(7, 0).unwrap();
    let a = kernel_eval(k, &[0.3, 0.4, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let b = kernel_eval(k, &[0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0]).unwrap();
    assert!((a - b).abs() < 1e-14 * a.abs());
    // leading term -a alpha |x|^{-(N-2)}
    let prof = BubbleProfile::new(7).unwrap();
    let mut x = [0.0; 7];
    x[2] = 1e3;
    let v = kernel_eval(k, &x).unwrap();
    let lead = -prof.a * prof.alpha * 1e3f64.powi(-5);
    assert!((v / lead - 1.0).abs() < 1e-5);
}

#[test]
fn linearized_residual_examples() {
    assert!(linearized_residual(KernelElement::new(7, 0).unwrap(), &[0.0; 7]).unwrap().abs() < 1e-10);
    let x = [0.3, -0.8, 1.7, 0.2, -2.4, 0.9, 0.05, 1.1, -0.6];
    let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let res = linearized_residual(KernelElement::new(9, 3).unwrap(), &x).unwrap();
    assert!(res.abs() <= 1e-9 * (1.0 + r).powi(-9));
}

#[test]
fn residual_detects_a_perturbed_profile() {
    // -Delta U - p U^{p-1} U = (1 - p) U^p
    let n = 7;
    let prof = BubbleProfile::new(n).unwrap();
    let r = 0.8;
    let lap = prof.laplacian(r);
    let u = prof.value(r);
    let res_u = -lap - prof.linearised_potential(r) * u;
    let expect = (1.0 - prof.p) * u.powf(prof.p);
    assert!((res_u - expect).abs() < 1e-10 * expect.abs());
    let mut x = [0.0; 7];
    x[0] = r;
    let res_psi = linearized_residual(KernelElement::new(n, 0).unwrap(), &x).unwrap();
    assert!((res_psi + res_u).abs() > 1.0);
}

#[test]
fn envelope() {
    assert_eq!(v_decay_envelope(&[0.0; 7], 7, 2.5).unwrap(), 2.5);
    let mut x = [0.0; 7];
    x[0] = 10.0;
    let v = v_decay_envelope(&x, 7, 1.0).unwrap();
    assert!((v - 101f64.powf(-1.5)).abs() < 1e-16);
    let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
    assert!(v_decay_envelope(&x2, 7, 1.0).unwrap() <= v);
    assert!(matches!(v_decay_envelope(&[0.0; 6], 6, 1.0), Err(Error::DimensionTooLow { .. })));
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, dim)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn critical_equation(dim in 3usize..12, log_mu in -2.0..2.0f64, seed in point(12), x in point(12)) {
        let b = Bubble { dim, mu: 10f64.powf(log_mu), center: seed[..dim].to_vec() };
        let (lap, up) = b.critical_terms(&x[..dim]).unwrap();
        prop_assert!((lap + up).abs() <= 1e-10 * up, "{lap:e} {up:e}");
    }

    #[test]
    fn kernel_annihilates(dim in 3usize..12, idx in 0usize..12, x in point(12)) {
        let k = KernelElement::new(dim, idx % (dim + 1)).unwrap();
        let x = &x[..dim];
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let res = linearized_residual(k, x).unwrap();
        prop_assert!(res.abs() <= 1e-9 * (1.0 + r).powi(-(dim as i32)), "{res:e}");
    }
}
