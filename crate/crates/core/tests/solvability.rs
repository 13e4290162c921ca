use bubble_tower::bubble::BubbleProfile;
use bubble_tower::quadrature::{integrate_radial, RadialIntegrand, RadialInterval};
use bubble_tower::solvability::*;
use bubble_tower::Error;

const TOL: f64 = 1e-10;

#[test]
fn zero_data() {
    let z = CurvatureData::zero(7);
    assert_eq!(solvability_nu(&z, TOL).unwrap(), 0.0);
    assert!(rhs_kernel_orthogonality(&z, TOL).unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn round_sphere_against_radial_reduction() {
    // For the unit sphere in normal coordinates the forcing term reduces to
    // (N-1) r U'(r) + beta N (N-1) U(r).
    let n = 7;
    let nf = n as f64;
    let prof = BubbleProfile::new(n).unwrap();
    let c = CurvatureData::unit_sphere(n);
    for x in [[0.3, 0.0, -0.4, 0.1, 0.0, 0.7, 0.2], [1.5, -2.0, 0.0, 0.0, 0.3, 0.0, 0.0]] {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let reduced = (nf - 1.0) * r * prof.radial_derivative(r) + beta(n) * nf * (nf - 1.0) * prof.value(r);
        assert!((rhs0_eval(&c, &x).unwrap() - reduced).abs() < 1e-12 * prof.alpha);
    }
    let whole = |f: &dyn Fn(f64) -> f64| {
        integrate_radial(&RadialIntegrand::new(f, 2.0 * nf - 4.0), RadialInterval::whole_space(), n, 1e-13)
            .unwrap()
            .value
    };
    let forcing = |r: f64| (nf - 1.0) * r * prof.radial_derivative(r) + beta(n) * nf * (nf - 1.0) * prof.value(r);
    let num = whole(&|r| forcing(r) * prof.kernel_radial(r));
    let den = whole(&|r| prof.kernel_radial(r).powi(2));
    let oracle = -num / den;
    let nu = solvability_nu(&c, TOL).unwrap();
    assert!((nu - oracle).abs() < 1e-8 * oracle.abs(), "{nu} vs {oracle}");
}

#[test]
fn linear_in_scale_and_blocks() {
    let c = random_curvature(7, 3, 11);
    let nu = solvability_nu(&c, TOL).unwrap();
    for lambda in [-2.0, 0.5, 7.0] {
        let v = solvability_nu(&c.scaled(lambda), TOL).unwrap();
        assert!((v - lambda * nu).abs() < 1e-8 * nu.abs().max(1.0));
    }
    let n = c.dim;
    let only = |r: bool, g: bool, s: bool| CurvatureData {
        dim: n,
        riemann: if r { c.riemann.clone() } else { vec![0.0; n.pow(4)] },
        christoffel_derivs: if g { c.christoffel_derivs.clone() } else { vec![0.0; n.pow(3)] },
        scalar_curv: if s { c.scalar_curv } else { 0.0 },
    };
    let parts: f64 = [only(true, false, false), only(false, true, false), only(false, false, true)]
        .iter()
        .map(|d| solvability_nu(d, TOL).unwrap())
        .sum();
    assert!((parts - nu).abs() < 1e-8 * nu.abs().max(1.0));
}

#[test]
fn random_data_is_consistent() {
    for seed in 0..4 {
        let c = random_curvature(7, 4, seed);
        c.validate().unwrap();
        assert!((c.scalar_curv - scalar_from_riemann(7, &c.riemann)).abs() < 1e-12 * c.scalar_curv.abs().max(1.0));
        let odd = rhs_kernel_orthogonality(&c, TOL).unwrap();
        assert_eq!(odd.len(), 7);
        assert!(odd.iter().all(|v| v.abs() <= 1e-9), "{odd:?}");
        let f = fredholm_check(&c, TOL).unwrap();
        assert!(f.pass, "{f:?}");
    }
}

#[test]
fn broken_symmetry_rejected() {
    let mut c = CurvatureData::unit_sphere(5);
    c.riemann[1] += 1e-3;
    assert!(matches!(c.validate(), Err(Error::SymmetryViolation { .. })));
    assert!(matches!(solvability_nu(&c, TOL), Err(Error::SymmetryViolation { .. })));
    assert!(CurvatureData::new(5, vec![0.0; 10], vec![0.0; 125], 0.0).is_err());
}

#[test]
fn json_round_trip() {
    let c = random_curvature(5, 2, 3);
    let text = serde_json::to_string(&c).unwrap();
    let back: CurvatureData = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
}
