//! Charts, metrics and curvature of warped products of spheres and ellipsoids.
//!
//! Index convention: `R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`,
//! `R^l_{ijk} dx_l = R(d_i, d_j) d_k` and `R_{ijkl} = g_{lm} R^m_{ijk}`, so a round
//! sphere of curvature `K` has `R_{ijkl} = K (g_jk g_il - g_ik g_jl)` and
//! `Ric_{jk} = g^{il} R_{ijkl}`.

mod catalog;
mod curvature;
mod symmetry;

pub use catalog::{
    builtin_catalog, load_catalog, Catalog, CatalogEntry, Isometry, WeylExpectation, FLAT_WEYL_TOL, NONZERO_WEYL,
};
pub use curvature::{
    curvature_at, invariant_defects, lcf_check, to_curvature_data, weyl_norm, CurvatureAtPoint, InvariantDefects,
    DEFAULT_FD_STEP,
};
pub use symmetry::{sample_points, symmetry_check, SymmetryReport};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest metric eigenvalue accepted.
pub const METRIC_EIGEN_FLOOR: f64 = 1e-10;
/// Distance kept from coordinate singularities when sampling.
pub const SAMPLE_MARGIN: f64 = 0.1;

/// A coordinate chart carrying a Riemannian metric.
pub trait Chart: Send + Sync {
    fn dim(&self) -> usize;
    /// Metric matrix at chart coordinates `u`, assumed inside the chart.
    fn metric_raw(&self, u: &[f64]) -> DMatrix<f64>;
    /// Whether every point within `margin` (coordinatewise) of `u` lies in the chart.
    fn contains(&self, u: &[f64], margin: f64) -> bool;
    /// A point kept [`SAMPLE_MARGIN`] away from the chart boundary.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64>
    where
        Self: Sized;
}

/// Positive function of the first base coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warping {
    Constant {
        value: f64,
    },
    /// `offset + amplitude cos(t)`.
    Cosine {
        offset: f64,
        amplitude: f64,
    },
    /// `amplitude sin(t)`.
    Sine {
        amplitude: f64,
    },
    /// `exp(rate t)`.
    Exp {
        rate: f64,
    },
}

impl Warping {
    pub fn eval(&self, base: &[f64]) -> f64 {
        let t = base.first().copied().unwrap_or(0.0);
        match *self {
            Warping::Constant { value } => value,
            Warping::Cosine { offset, amplitude } => offset + amplitude * t.cos(),
            Warping::Sine { amplitude } => amplitude * t.sin(),
            Warping::Exp { rate } => (rate * t).exp(),
        }
    }
}

/// Manifold description, iterable through `Warped`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldSpec {
    /// Box `[lo, hi]^dim` with the Euclidean metric.
    Flat { dim: usize, lo: f64, hi: f64 },
    /// `S^dim` of the given radius in hyperspherical angles
    /// `(t_1, ..., t_dim)`, `t_i` in `(0, pi)` for `i < dim` and `t_dim` in `(-pi, pi)`.
    Sphere { dim: usize, radius: f64 },
    /// Lower hemisphere of `S^dim` as the graph `x_{dim+1} = -sqrt(r^2 - |u|^2)`;
    /// the south pole is `u = 0`.
    SphereGraph { dim: usize, radius: f64 },
    /// Ellipsoid `sum x_i^2 / a_i^2 = 1` in `R^{n+1}` in hyperspherical angles.
    Ellipsoid { semi_axes: Vec<f64> },
    /// `B x_f F` with metric `g_B + f^2 g_F`; `f = 1` gives the plain product.
    Warped { base: Box<ManifoldSpec>, fiber: Box<ManifoldSpec>, warping: Warping },
}

impl ManifoldSpec {
    pub fn sphere(dim: usize) -> Self {
        ManifoldSpec::Sphere { dim, radius: 1.0 }
    }

    pub fn sphere_graph(dim: usize) -> Self {
        ManifoldSpec::SphereGraph { dim, radius: 1.0 }
    }

    pub fn product(base: ManifoldSpec, fiber: ManifoldSpec) -> Self {
        Self::warped(base, fiber, Warping::Constant { value: 1.0 })
    }

    pub fn warped(base: ManifoldSpec, fiber: ManifoldSpec, warping: Warping) -> Self {
        ManifoldSpec::Warped { base: Box::new(base), fiber: Box::new(fiber), warping }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ManifoldSpec::Flat { dim, lo, hi } => {
                if *dim == 0 || !(lo < hi) {
                    return Err(Error::Invalid(format!("bad flat box dim {dim} [{lo}, {hi}]")));
                }
            }
            ManifoldSpec::Sphere { dim, radius } | ManifoldSpec::SphereGraph { dim, radius } => {
                if *dim == 0 || !(*radius > 0.0) {
                    return Err(Error::Invalid(format!("bad sphere dim {dim} radius {radius}")));
                }
            }
            ManifoldSpec::Ellipsoid { semi_axes } => {
                if semi_axes.len() < 2 || semi_axes.iter().any(|a| !(*a > 0.0)) {
                    return Err(Error::Invalid("ellipsoid needs at least two positive semi-axes".into()));
                }
            }
            ManifoldSpec::Warped { base, fiber, warping } => {
                base.validate()?;
                fiber.validate()?;
                if let Warping::Constant { value } = warping {
                    if !(*value > 0.0) {
                        return Err(Error::Invalid(format!("warping {value} must be positive")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Unit vector of `R^{n+1}` with hyperspherical angles `t`.
pub fn hyperspherical(t: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut out = Vec::with_capacity(n + 1);
    let mut prod = 1.0;
    for &ti in t {
        out.push(prod * ti.cos());
        prod *= ti.sin();
    }
    out.push(prod);
    out
}

/// Jacobian `d omega_i / d t_m` of [`hyperspherical`], `(n+1) x n`.
fn hyperspherical_jacobian(t: &[f64]) -> DMatrix<f64> {
    let n = t.len();
    let (s, c): (Vec<f64>, Vec<f64>) = t.iter().map(|v| v.sin_cos()).unzip();
    DMatrix::from_fn(n + 1, n, |i, m| {
        if m > i {
            return 0.0;
        }
        let mut v = 1.0;
        for j in 0..i.min(n) {
            v *= if j == m { c[j] } else { s[j] };
        }
        if i < n {
            v *= if m == i { -s[i] } else { c[i] };
        }
        v
    })
}

fn angle_box_contains(u: &[f64], margin: f64) -> bool {
    let n = u.len();
    u.iter().enumerate().all(|(i, &t)| {
        if i + 1 < n {
            t - margin > 0.0 && t + margin < PI
        } else {
            t - margin > -PI && t + margin < PI
        }
    })
}

fn angle_box_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let (lo, hi) = if i + 1 < n { (0.0, PI) } else { (-PI, PI) };
            rng.random_range(lo + SAMPLE_MARGIN..hi - SAMPLE_MARGIN)
        })
        .collect()
}

impl Chart for ManifoldSpec {
    fn dim(&self) -> usize {
        match self {
            ManifoldSpec::Flat { dim, .. }
            | ManifoldSpec::Sphere { dim, .. }
            | ManifoldSpec::SphereGraph { dim, .. } => *dim,
            ManifoldSpec::Ellipsoid { semi_axes } => semi_axes.len() - 1,
            ManifoldSpec::Warped { base, fiber, .. } => base.dim() + fiber.dim(),
        }
    }

    fn metric_raw(&self, u: &[f64]) -> DMatrix<f64> {
        match self {
            ManifoldSpec::Flat { dim, .. } => DMatrix::identity(*dim, *dim),
            ManifoldSpec::Sphere { dim, radius } => {
                let mut g = DMatrix::zeros(*dim, *dim);
                let mut w = radius * radius;
                for i in 0..*dim {
                    g[(i, i)] = w;
                    w *= u[i].sin().powi(2);
                }
                g
            }
            ManifoldSpec::SphereGraph { dim, radius } => {
                let rest = radius * radius - u.iter().map(|v| v * v).sum::<f64>();
                DMatrix::from_fn(*dim, *dim, |i, j| (i == j) as u8 as f64 + u[i] * u[j] / rest)
            }
            ManifoldSpec::Ellipsoid { semi_axes } => {
                let mut jac = hyperspherical_jacobian(u);
                for (i, a) in semi_axes.iter().enumerate() {
                    jac.row_mut(i).scale_mut(*a);
                }
                jac.transpose() * jac
            }
            ManifoldSpec::Warped { base, fiber, warping } => {
                let nb = base.dim();
                let n = self.dim();
                let (ub, uf) = u.split_at(nb);
                let gb = base.metric_raw(ub);
                let gf = fiber.metric_raw(uf);
                let f2 = warping.eval(ub).powi(2);
                let mut g = DMatrix::zeros(n, n);
                g.view_mut((0, 0), (nb, nb)).copy_from(&gb);
                g.view_mut((nb, nb), (n - nb, n - nb)).copy_from(&(gf * f2));
                g
            }
        }
    }

    fn contains(&self, u: &[f64], margin: f64) -> bool {
        if u.len() != self.dim() || u.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            ManifoldSpec::Flat { lo, hi, .. } => u.iter().all(|&v| v - margin >= *lo && v + margin <= *hi),
            ManifoldSpec::Sphere { .. } | ManifoldSpec::Ellipsoid { .. } => angle_box_contains(u, margin),
            ManifoldSpec::SphereGraph { radius, .. } => {
                // farthest point of the margin cube from the origin
                let far: f64 = u.iter().map(|v| (v.abs() + margin).powi(2)).sum();
                far.sqrt() < *radius
            }
            ManifoldSpec::Warped { base, fiber, warping } => {
                let (ub, uf) = u.split_at(base.dim());
                base.contains(ub, margin) && fiber.contains(uf, margin) && warping.eval(ub) > 0.0
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            ManifoldSpec::Flat { dim, lo, hi } => {
                let m = SAMPLE_MARGIN.min(0.25 * (hi - lo));
                (0..*dim).map(|_| rng.random_range(lo + m..hi - m)).collect()
            }
            ManifoldSpec::Sphere { dim, .. } => angle_box_sample(*dim, rng),
            ManifoldSpec::Ellipsoid { semi_axes } => angle_box_sample(semi_axes.len() - 1, rng),
            ManifoldSpec::SphereGraph { dim, radius } => loop {
                let u: Vec<f64> = (0..*dim).map(|_| rng.random_range(-0.7 * radius..0.7 * radius)).collect();
                if self.contains(&u, SAMPLE_MARGIN) {
                    break u;
                }
            },
            ManifoldSpec::Warped { base, fiber, .. } => loop {
                let mut u = base.sample(rng);
                u.extend(fiber.sample(rng));
                if self.contains(&u, SAMPLE_MARGIN) {
                    break u;
                }
            },
        }
    }
}

/// Metric at `u`, checked for symmetry and positive definiteness.
pub fn metric_at<C: Chart + ?Sized>(chart: &C, u: &[f64]) -> Result<DMatrix<f64>> {
    if !chart.contains(u, 0.0) {
        return Err(Error::OutOfDomain);
    }
    let g = chart.metric_raw(u);
    let min_eig = SymmetricEigen::new(g.clone()).eigenvalues.min();
    if !(min_eig > METRIC_EIGEN_FLOOR) {
        return Err(Error::SingularMetric(min_eig));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_s2_metric() {
        let g = metric_at(&ManifoldSpec::sphere(2), &[0.7, 0.3]).unwrap();
        assert!((g[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((g[(1, 1)] - 0.7f64.sin().powi(2)).abs() < 1e-15);
        assert_eq!(g[(0, 1)], 0.0);
    }

    #[test]
    fn ellipsoid_with_equal_axes_is_sphere() {
        let e = ManifoldSpec::Ellipsoid { semi_axes: vec![2.0; 4] };
        let s = ManifoldSpec::Sphere { dim: 3, radius: 2.0 };
        let u = [0.4, 1.1, -2.0];
        assert!((e.metric_raw(&u) - s.metric_raw(&u)).abs().max() < 1e-14);
    }

    #[test]
    fn jacobian_matches_differences() {
        let t = [0.4, 1.1, 2.5, -0.3];
        let jac = hyperspherical_jacobian(&t);
        let h = 1e-6;
        for m in 0..t.len() {
            let mut tp = t;
            let mut tm = t;
            tp[m] += h;
            tm[m] -= h;
            let (a, b) = (hyperspherical(&tp), hyperspherical(&tm));
            for i in 0..=t.len() {
                assert!((jac[(i, m)] - (a[i] - b[i]) / (2.0 * h)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn warped_blocks() {
        let spec = ManifoldSpec::warped(
            ManifoldSpec::Flat { dim: 1, lo: 0.0, hi: 3.0 },
            ManifoldSpec::Sphere { dim: 2, radius: 3.0 },
            Warping::Cosine { offset: 2.0, amplitude: 1.0 },
        );
        let u = [0.5, 1.0, 0.2];
        let g = metric_at(&spec, &u).unwrap();
        let f2 = (2.0 + 0.5f64.cos()).powi(2);
        assert!((g[(1, 1)] - 9.0 * f2).abs() < 1e-13);
        assert!((g[(2, 2)] - 9.0 * f2 * 1.0f64.sin().powi(2)).abs() < 1e-13);
        assert_eq!(g[(0, 1)], 0.0);
    }

    #[test]
    fn out_of_domain() {
        assert!(matches!(metric_at(&ManifoldSpec::sphere_graph(2), &[0.9, 0.9]), Err(Error::OutOfDomain)));
    }
}
