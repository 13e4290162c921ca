//! Curvature data at a point and the projection of the curvature forcing term
//! onto the linearised kernel.
//!
//! The forcing term is
//! `F(x) = -1/3 R_{iabj} x_a x_b d_ij U + (sum_i d_l Gamma^k_ii) x_l d_k U + beta_N R U`
//! with `beta_N = (N-2)/(4(N-1))`, and `nu = -<F, psi^0> / <psi^0, psi^0>` in L^2.
//! Using `d_ij U = delta_ij U'/r + x_i x_j (U'' - U'/r)/r^2`, every projection
//! reduces to monomial moments times three radial integrals.

use crate::bubble::BubbleProfile;
use crate::error::{Error, Result};
use crate::quadrature::{
    angular_moment_factor, integrate_radial, integrate_radial_abs, moment_integral, sphere_area, RadialIntegrand,
    RadialInterval,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Riemann tensor `R_{iabj}`, trace of Christoffel derivatives and scalar curvature
/// at a point, in normal coordinates.
///
/// Arrays are flat, row-major, zero-based:
/// `riemann[((i*N + a)*N + b)*N + j] = R_{iabj}` and
/// `christoffel_derivs[(l*N + k)*N + i] = d_l Gamma^k_{ii}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureData {
    pub dim: usize,
    pub riemann: Vec<f64>,
    pub christoffel_derivs: Vec<f64>,
    pub scalar_curv: f64,
}

const SYMMETRY_TOL: f64 = 1e-10;

impl CurvatureData {
    /// Builds and validates curvature data.
    pub fn new(dim: usize, riemann: Vec<f64>, christoffel_derivs: Vec<f64>, scalar_curv: f64) -> Result<Self> {
        let c = CurvatureData { dim, riemann, christoffel_derivs, scalar_curv };
        c.validate()?;
        Ok(c)
    }

    pub fn zero(dim: usize) -> Self {
        CurvatureData {
            dim,
            riemann: vec![0.0; dim.pow(4)],
            christoffel_derivs: vec![0.0; dim.pow(3)],
            scalar_curv: 0.0,
        }
    }

    /// Unit round sphere `S^N` at a point in normal coordinates:
    /// `R_{iabj} = delta_ib delta_aj - delta_ij delta_ab`, `sum_i d_l Gamma^k_ii = 2/3 (N-1) delta_kl`.
    pub fn unit_sphere(dim: usize) -> Self {
        let riemann =
            algebraic_from_fn(dim, |i, a, b, j| (i == b && a == j) as u8 as f64 - (i == j && a == b) as u8 as f64);
        christoffel_from_riemann(dim, riemann, (dim * (dim - 1)) as f64)
    }

    #[inline]
    pub fn r(&self, i: usize, a: usize, b: usize, j: usize) -> f64 {
        let n = self.dim;
        self.riemann[((i * n + a) * n + b) * n + j]
    }

    #[inline]
    pub fn dgamma(&self, l: usize, k: usize, i: usize) -> f64 {
        let n = self.dim;
        self.christoffel_derivs[(l * n + k) * n + i]
    }

    /// `sum_i d_l Gamma^k_ii`.
    pub fn dgamma_trace(&self, l: usize, k: usize) -> f64 {
        (0..self.dim).map(|i| self.dgamma(l, k, i)).sum()
    }

    /// Largest violation of `R_iabj = -R_aibj = -R_iajb = R_bjia`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for j in 0..n {
                        let v = self.r(i, a, b, j);
                        worst = worst
                            .max((v + self.r(a, i, b, j)).abs())
                            .max((v + self.r(i, a, j, b)).abs())
                            .max((v - self.r(b, j, i, a)).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        if self.riemann.len() != n.pow(4) || self.christoffel_derivs.len() != n.pow(3) {
            return Err(Error::Invalid(format!("curvature arrays do not match dimension {n}")));
        }
        let scale = self.riemann.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let defect = self.symmetry_defect();
        if defect > SYMMETRY_TOL * scale {
            return Err(Error::SymmetryViolation { what: "Riemann pair/antisymmetry", defect });
        }
        Ok(())
    }

    /// Same data with every block multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        CurvatureData {
            dim: self.dim,
            riemann: self.riemann.iter().map(|v| v * lambda).collect(),
            christoffel_derivs: self.christoffel_derivs.iter().map(|v| v * lambda).collect(),
            scalar_curv: self.scalar_curv * lambda,
        }
    }
}

pub(crate) fn algebraic_from_fn(dim: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; dim.pow(4)];
    for i in 0..dim {
        for a in 0..dim {
            for b in 0..dim {
                for j in 0..dim {
                    out[((i * dim + a) * dim + b) * dim + j] = f(i, a, b, j);
                }
            }
        }
    }
    out
}

/// Random algebraic curvature tensor `sum_t h_t . k_t` of Kulkarni–Nomizu
/// products of symmetric matrices with entries uniform in `[-1, 1]`, completed
/// to normal-coordinate data with the matching scalar curvature.
pub fn random_curvature(dim: usize, terms: usize, seed: u64) -> CurvatureData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sym = || {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v: f64 = rng.random_range(-1.0..1.0);
                m[i * dim + j] = v;
                m[j * dim + i] = v;
            }
        }
        m
    };
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..terms).map(|_| (sym(), sym())).collect();
    // (h . k)_{abcd} = h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad
    let riemann = algebraic_from_fn(dim, |a, b, c, d| {
        pairs
            .iter()
            .map(|(h, k)| {
                let (h, k) = (|i: usize, j: usize| h[i * dim + j], |i: usize, j: usize| k[i * dim + j]);
                h(a, c) * k(b, d) + h(b, d) * k(a, c) - h(a, d) * k(b, c) - h(b, c) * k(a, d)
            })
            .sum()
    });
    let scalar = scalar_from_riemann(dim, &riemann);
    christoffel_from_riemann(dim, riemann, scalar)
}

/// `R = sum_{a,b} R_{abab}`.
pub fn scalar_from_riemann(dim: usize, riemann: &[f64]) -> f64 {
    let mut s = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            s += riemann[((a * dim + b) * dim + a) * dim + b];
        }
    }
    s
}

/// Completes Riemann data to normal-coordinate curvature data.
///
/// In normal coordinates `g_ij = delta_ij - 1/3 R_{iajb} x_a x_b`, so the second
/// metric derivatives are `d_l d_m g_ij = -1/3 (R_{iljm} + R_{imjl})` and
/// `d_l Gamma^k_ii = d_l d_i g_ki - 1/2 d_l d_k g_ii` at the origin.
pub fn christoffel_from_riemann(dim: usize, riemann: Vec<f64>, scalar_curv: f64) -> CurvatureData {
    let n = dim;
    let rr = |i: usize, a: usize, b: usize, j: usize| riemann[((i * n + a) * n + b) * n + j];
    // A(i, j; l, m) = d_l d_m g_ij
    let a2 = |i: usize, j: usize, l: usize, m: usize| -(rr(i, l, j, m) + rr(i, m, j, l)) / 3.0;
    let mut cd = vec![0.0; n.pow(3)];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                // d_l Gamma^k_ii = 1/2 (2 d_l d_i g_ki - d_l d_k g_ii) at the origin
                cd[(l * n + k) * n + i] = a2(k, i, l, i) - 0.5 * a2(i, i, l, k);
            }
        }
    }
    CurvatureData { dim, riemann, christoffel_derivs: cd, scalar_curv }
}

/// `beta_N = (N-2) / (4(N-1))`.
pub fn beta(dim: usize) -> f64 {
    (dim as f64 - 2.0) / (4.0 * (dim as f64 - 1.0))
}

/// Pointwise forcing term at `x`.
pub fn rhs0_eval(c: &CurvatureData, x: &[f64]) -> Result<f64> {
    let prof = BubbleProfile::new(c.dim)?;
    let n = c.dim;
    assert_eq!(x.len(), n, "point dimension mismatch");
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u1 = prof.grad_over_r(r);
    let u2 = prof.hessian_radial(r);
    let mut quad = 0.0;
    for i in 0..n {
        for a in 0..n {
            for b in 0..n {
                let xab = x[a] * x[b];
                for j in 0..n {
                    let rv = c.r(i, a, b, j);
                    if rv == 0.0 {
                        continue;
                    }
                    let hij = if i == j { u1 } else { 0.0 } + x[i] * x[j] * u2;
                    quad += rv * xab * hij;
                }
            }
        }
    }
    let mut lin = 0.0;
    for l in 0..n {
        for k in 0..n {
            lin += c.dgamma_trace(l, k) * x[l] * x[k] * u1;
        }
    }
    Ok(-quad / 3.0 + lin + beta(n) * c.scalar_curv * prof.value(r))
}

/// Caches moment integrals by exponent pattern; the value depends only on the
/// multiset of exponents.
struct Moments<F: Fn(f64) -> f64> {
    g: RadialIntegrand<F>,
    dim: usize,
    rel_tol: f64,
    cache: BTreeMap<Vec<u32>, f64>,
}

impl<F: Fn(f64) -> f64> Moments<F> {
    fn get(&mut self, idx: &[usize]) -> Result<f64> {
        let mut alpha = vec![0u32; self.dim];
        for &i in idx {
            alpha[i] += 1;
        }
        if alpha.iter().any(|a| a % 2 == 1) {
            return Ok(0.0);
        }
        let mut key: Vec<u32> = alpha.iter().copied().filter(|&a| a > 0).collect();
        key.sort_unstable();
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let v = moment_integral(&self.g, &alpha, RadialInterval::whole_space(), self.dim, self.rel_tol)?;
        self.cache.insert(key, v);
        Ok(v)
    }
}

/// `<F, psi^0>` and `<psi^0, psi^0>`.
fn projections_on_psi0(c: &CurvatureData, rel_tol: f64) -> Result<(f64, f64)> {
    c.validate()?;
    let prof = BubbleProfile::new(c.dim)?;
    let n = c.dim;
    let decay = 2.0 * n as f64 - 4.0;
    let mut m1 = Moments {
        g: RadialIntegrand::new(move |r| prof.grad_over_r(r) * prof.kernel_radial(r), decay + 2.0),
        dim: n,
        rel_tol,
        cache: BTreeMap::new(),
    };
    let mut m2 = Moments {
        g: RadialIntegrand::new(move |r| prof.hessian_radial(r) * prof.kernel_radial(r), decay + 4.0),
        dim: n,
        rel_tol,
        cache: BTreeMap::new(),
    };
    let mut quad = 0.0;
    for i in 0..n {
        for a in 0..n {
            for b in 0..n {
                for j in 0..n {
                    let rv = c.r(i, a, b, j);
                    if rv == 0.0 {
                        continue;
                    }
                    let mut t = m2.get(&[a, b, i, j])?;
                    if i == j {
                        t += m1.get(&[a, b])?;
                    }
                    quad += rv * t;
                }
            }
        }
    }
    let mut lin = 0.0;
    for l in 0..n {
        for k in 0..n {
            let g = c.dgamma_trace(l, k);
            if g != 0.0 {
                lin += g * m1.get(&[l, k])?;
            }
        }
    }
    let whole = RadialInterval::whole_space();
    let u_psi0 =
        integrate_radial(&RadialIntegrand::new(|r| prof.value(r) * prof.kernel_radial(r), decay), whole, n, rel_tol)?
            .value;
    let psi0_sq =
        integrate_radial(&RadialIntegrand::new(|r| prof.kernel_radial(r).powi(2), decay), whole, n, rel_tol)?.value;
    let proj = -quad / 3.0 + lin + beta(n) * c.scalar_curv * u_psi0;
    Ok((proj, psi0_sq))
}

/// `nu = -<F, psi^0> / <psi^0, psi^0>`.
pub fn solvability_nu(c: &CurvatureData, rel_tol: f64) -> Result<f64> {
    let (proj, norm) = projections_on_psi0(c, rel_tol)?;
    Ok(-proj / norm)
}

/// Degree-5 cubature on the unit sphere `S^{n-1}`: the `2n` points `+-e_i` and
/// the `2n(n-1)` points `(+-e_i +- e_j)/sqrt 2`.
pub fn sphere_cubature(dim: usize) -> Vec<(Vec<f64>, f64)> {
    let n = dim as f64;
    let area = sphere_area(dim);
    let wa = (4.0 - n) / (2.0 * n * (n + 2.0)) * area;
    let wb = area / (n * (n + 2.0));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut pts = Vec::with_capacity(2 * dim * dim);
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut p = vec![0.0; dim];
            p[i] = s;
            pts.push((p, wa));
        }
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut p = vec![0.0; dim];
                p[i] = si * h;
                p[j] = sj * h;
                pts.push((p, wb));
            }
        }
    }
    pts
}

/// `int F(x) w(x) dx` with the angular part by sphere cubature (exact for the
/// degree-5 angular dependence in play) and the radial part adaptive.
fn cubature_projection(c: &CurvatureData, weight: impl Fn(&[f64]) -> f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    let n = c.dim;
    let pts = sphere_cubature(n);
    let inner = |r: f64| -> f64 {
        let mut acc = 0.0;
        let mut x = vec![0.0; n];
        for (w, wt) in &pts {
            for (xi, wi) in x.iter_mut().zip(w) {
                *xi = r * wi;
            }
            acc += wt * rhs0_eval(c, &x).expect("validated") * weight(&x);
        }
        acc
    };
    // Integrand is r^{N-1} * (angular integral); integrate_radial multiplies by
    // sigma r^{N-1}, so divide the angular sum by sigma.
    let sigma = sphere_area(n);
    let f = RadialIntegrand::new(|r: f64| inner(r) / sigma, 2.0 * n as f64 - 4.0);
    match integrate_radial_abs(&f, RadialInterval::whole_space(), n, rel_tol, abs_tol) {
        Ok(q) => Ok(q.value),
        // Odd projections vanish up to rounding, where a relative tolerance
        // cannot be met; the best estimate is the answer.
        Err(Error::ToleranceNotReached { value, .. }) => Ok(value),
        Err(e) => Err(e),
    }
}

/// Absolute tolerance for projections that vanish by parity.
pub const ODD_ABS_TOL: f64 = 1e-12;

/// `<F, psi^i>` for `i = 1..N`.
pub fn rhs_kernel_orthogonality(c: &CurvatureData, rel_tol: f64) -> Result<Vec<f64>> {
    c.validate()?;
    let prof = BubbleProfile::new(c.dim)?;
    (0..c.dim)
        .map(|i| {
            cubature_projection(
                c,
                |x| x[i] * prof.grad_over_r(x.iter().map(|v| v * v).sum::<f64>().sqrt()),
                rel_tol,
                ODD_ABS_TOL,
            )
        })
        .collect()
}

/// Re-verification of the orthogonality condition defining `nu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FredholmCheck {
    pub nu: f64,
    /// `<F, psi^0>` recomputed pointwise with sphere cubature.
    pub projection: f64,
    pub psi0_norm_sq: f64,
    /// `<F + nu psi^0, psi^0>`.
    pub residual: f64,
    /// Residual allowed: `10 rel_tol <psi^0,psi^0> max(1, |nu|)`.
    pub bound: f64,
    pub pass: bool,
}

pub fn fredholm_check(c: &CurvatureData, rel_tol: f64) -> Result<FredholmCheck> {
    let nu = solvability_nu(c, rel_tol)?;
    let prof = BubbleProfile::new(c.dim)?;
    let projection =
        cubature_projection(c, |x| prof.kernel_radial(x.iter().map(|v| v * v).sum::<f64>().sqrt()), rel_tol, 0.0)?;
    let psi0_norm_sq = integrate_radial(
        &RadialIntegrand::new(|r| prof.kernel_radial(r).powi(2), 2.0 * c.dim as f64 - 4.0),
        RadialInterval::whole_space(),
        c.dim,
        rel_tol,
    )?
    .value;
    let residual = projection + nu * psi0_norm_sq;
    let bound = 10.0 * rel_tol * psi0_norm_sq * nu.abs().max(1.0);
    Ok(FredholmCheck { nu, projection, psi0_norm_sq, residual, bound, pass: residual.abs() <= bound })
}

/// Exact sphere average of `x^alpha` over monomials of degree at most 4, exposed
/// for callers assembling their own projections.
pub fn sphere_average(idx: &[usize], dim: usize) -> Result<f64> {
    let mut alpha = vec![0u32; dim];
    for &i in idx {
        alpha[i] += 1;
    }
    angular_moment_factor(&alpha, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubature_is_exact_to_degree_four() {
        let n = 6;
        let pts = sphere_cubature(n);
        let total: f64 = pts.iter().map(|(_, w)| w).sum();
        assert!((total - sphere_area(n)).abs() < 1e-12);
        let m = |f: &dyn Fn(&[f64]) -> f64| pts.iter().map(|(p, w)| w * f(p)).sum::<f64>() / sphere_area(n);
        let nn = n as f64;
        assert!((m(&|p| p[0] * p[0]) - 1.0 / nn).abs() < 1e-14);
        assert!((m(&|p| p[0].powi(4)) - 3.0 / (nn * (nn + 2.0))).abs() < 1e-14);
        assert!((m(&|p| p[0] * p[0] * p[1] * p[1]) - 1.0 / (nn * (nn + 2.0))).abs() < 1e-14);
        assert!(m(&|p| p[0].powi(3) * p[1] * p[1]).abs() < 1e-15);
    }

    #[test]
    fn sphere_christoffel_trace() {
        let c = CurvatureData::unit_sphere(7);
        for l in 0..7 {
            for k in 0..7 {
                let expect = if l == k { 2.0 / 3.0 * 6.0 } else { 0.0 };
                assert!((c.dgamma_trace(l, k) - expect).abs() < 1e-14);
            }
        }
        assert!(c.validate().is_ok());
    }

    #[test]
    fn asymmetric_data_rejected() {
        let mut c = CurvatureData::zero(4);
        c.riemann[1] = 1.0;
        assert!(matches!(c.validate(), Err(Error::SymmetryViolation { .. })));
    }
}
