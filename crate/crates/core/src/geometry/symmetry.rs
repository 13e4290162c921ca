//! Point symmetries: metric pullback and the differential at the fixed point.

use super::{metric_at, Chart};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Largest `|H(p) - p|` accepted for the fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-10;

/// Deterministic sample of chart points.
pub fn sample_points<C: Chart>(chart: &C, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| chart.sample(&mut rng)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// `max |dH^T g(H(u)) dH - g(u)|` over the samples and the fixed point.
    pub max_metric_defect: f64,
    /// `max |dH_p + Id|` entrywise.
    pub dh_plus_identity: f64,
    pub fixed_point_defect: f64,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Differential of `h` at `u` by fourth-order central differences and one
/// Richardson step.
fn differential(h: &dyn Fn(&[f64]) -> Vec<f64>, u: &[f64], step: f64) -> DMatrix<f64> {
    let n = u.len();
    let d = |s: f64| {
        let cols: Vec<DVector<f64>> = (0..n)
            .map(|j| {
                let at = |t: f64| {
                    let mut v = u.to_vec();
                    v[j] += t;
                    DVector::from_vec(h(&v))
                };
                (at(-2.0 * s) - at(2.0 * s) + (at(s) - at(-s)) * 8.0) / (12.0 * s)
            })
            .collect();
        DMatrix::from_columns(&cols)
    };
    let coarse = d(step);
    let fine = d(0.5 * step);
    (fine * 16.0 - coarse) / 15.0
}

/// Checks that `h` is an isometry of `chart` fixing `p` with `dH_p = -Id`.
pub fn symmetry_check<C: Chart + ?Sized>(
    chart: &C,
    h: &dyn Fn(&[f64]) -> Vec<f64>,
    p: &[f64],
    samples: &[Vec<f64>],
    fd_step: f64,
    tol: f64,
) -> Result<SymmetryReport> {
    if !(fd_step > 0.0) {
        return Err(Error::StepTooSmall(fd_step));
    }
    let hp = h(p);
    let fixed_point_defect = hp.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if !(fixed_point_defect <= FIXED_POINT_TOL) {
        return Err(Error::FixedPointViolation(fixed_point_defect));
    }
    let n = chart.dim();
    let mut worst = 0.0f64;
    let mut dh_p = None;
    for u in std::iter::once(p).chain(samples.iter().map(|v| v.as_slice())) {
        if !chart.contains(u, fd_step) {
            return Err(Error::OutOfDomain);
        }
        let image = h(u);
        let dh = differential(h, u, fd_step);
        let pulled = dh.transpose() * metric_at(chart, &image)? * &dh;
        worst = worst.max((pulled - metric_at(chart, u)?).abs().max());
        if dh_p.is_none() {
            dh_p = Some(dh);
        }
    }
    let dh_plus_identity = (dh_p.expect("fixed point visited first") + DMatrix::identity(n, n)).abs().max();
    Ok(SymmetryReport {
        max_metric_defect: worst,
        dh_plus_identity,
        fixed_point_defect,
        samples: samples.len(),
        tol,
        pass: worst <= tol && dh_plus_identity <= tol,
    })
}
