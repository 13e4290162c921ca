//! Curvature tensors from finite differences of the metric.

use super::{metric_at, Chart};
use crate::error::{Error, Result};
use crate::solvability::{christoffel_from_riemann, CurvatureData};
use nalgebra::DMatrix;
use serde::Serialize;

/// Base step of the metric differences; one Richardson step halves it.
pub const DEFAULT_FD_STEP: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureAtPoint {
    pub dim: usize,
    pub point: Vec<f64>,
    /// Row-major `n x n`.
    pub metric: Vec<f64>,
    pub inverse_metric: Vec<f64>,
    /// `christoffel[(k*n + i)*n + j] = Gamma^k_{ij}`.
    pub christoffel: Vec<f64>,
    /// `riemann[((i*n + j)*n + k)*n + l] = R_{ijkl}`.
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
    pub weyl: Vec<f64>,
    pub weyl_norm_sq: f64,
    /// Estimated absolute error of the curvature entries.
    pub fd_tolerance: f64,
}

#[inline]
fn i4(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

impl CurvatureAtPoint {
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.riemann[i4(self.dim, i, j, k, l)]
    }

    pub fn w(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.weyl[i4(self.dim, i, j, k, l)]
    }

    pub fn metric_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.metric)
    }
}

/// First and second metric derivatives at step `h`:
/// `dg[l]` is `d_l g` and `ddg[k][l]` is `d_k d_l g`, both fourth order.
fn metric_derivatives<C: Chart + ?Sized>(chart: &C, u: &[f64], h: f64) -> (Vec<DMatrix<f64>>, Vec<Vec<DMatrix<f64>>>) {
    let n = u.len();
    let at = |shifts: &[(usize, f64)]| {
        let mut v = u.to_vec();
        for &(i, s) in shifts {
            v[i] += s * h;
        }
        chart.metric_raw(&v)
    };
    const C1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
    let g0 = chart.metric_raw(u);
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|l| C1.iter().fold(DMatrix::zeros(n, n), |acc, &(s, c)| acc + at(&[(l, s)]) * c) / (12.0 * h))
        .collect();
    let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
    for k in 0..n {
        ddg[k][k] = (at(&[(k, 2.0)]) * -1.0 + at(&[(k, 1.0)]) * 16.0 - &g0 * 30.0 + at(&[(k, -1.0)]) * 16.0
            - at(&[(k, -2.0)]))
            / (12.0 * h * h);
        for l in k + 1..n {
            let mut acc = DMatrix::zeros(n, n);
            for &(a, ca) in &C1 {
                for &(b, cb) in &C1 {
                    acc += at(&[(k, a), (l, b)]) * (ca * cb);
                }
            }
            acc /= 144.0 * h * h;
            ddg[l][k] = acc.clone();
            ddg[k][l] = acc;
        }
    }
    (dg, ddg)
}

struct Tensors {
    christoffel: Vec<f64>,
    riemann: Vec<f64>,
}

fn tensors_from_derivatives(
    g: &DMatrix<f64>,
    gi: &DMatrix<f64>,
    dg: &[DMatrix<f64>],
    ddg: &[Vec<DMatrix<f64>>],
) -> Tensors {
    let n = g.nrows();
    // first kind: gl[(l*n + i)*n + j] = Gamma_{l,ij}
    let mut gl = vec![0.0; n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                gl[(l * n + i) * n + j] = 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
            }
        }
    }
    let mut christoffel = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                christoffel[(k * n + i) * n + j] = (0..n).map(|l| gi[(k, l)] * gl[(l * n + i) * n + j]).sum();
            }
        }
    }
    let g1 = |m: usize, a: usize, b: usize| gl[(m * n + a) * n + b];
    let g2 = |p: usize, a: usize, b: usize| christoffel[(p * n + a) * n + b];
    let mut riemann = vec![0.0; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let second = 0.5 * (ddg[i][k][(j, l)] - ddg[i][l][(j, k)] - ddg[j][k][(i, l)] + ddg[j][l][(i, k)]);
                    // g^{mp} Gamma_{m,lj} Gamma_{p,ik} = Gamma_{m,lj} Gamma^m_{ik}
                    let quad: f64 = (0..n).map(|m| g1(m, l, j) * g2(m, i, k) - g1(m, l, i) * g2(m, j, k)).sum();
                    riemann[i4(n, i, j, k, l)] = second + quad;
                }
            }
        }
    }
    Tensors { christoffel, riemann }
}

/// `(h . k)_{ijkl} = h_il k_jk + h_jk k_il - h_ik k_jl - h_jl k_ik`.
fn kulkarni_nomizu(h: &DMatrix<f64>, k: &DMatrix<f64>) -> Vec<f64> {
    let n = h.nrows();
    let mut out = vec![0.0; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    out[i4(n, i, j, a, b)] =
                        h[(i, b)] * k[(j, a)] + h[(j, a)] * k[(i, b)] - h[(i, a)] * k[(j, b)] - h[(j, b)] * k[(i, a)];
                }
            }
        }
    }
    out
}

/// Raises every index of a 4-tensor with `gi`.
fn raise_all(t: &[f64], gi: &DMatrix<f64>) -> Vec<f64> {
    let n = gi.nrows();
    let mut cur = t.to_vec();
    for slot in 0..4 {
        let stride = n.pow(3 - slot as u32);
        let mut next = vec![0.0; cur.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let a = (idx / stride) % n;
            let base = idx - a * stride;
            *out = (0..n).map(|b| gi[(a, b)] * cur[base + b * stride]).sum();
        }
        cur = next;
    }
    cur
}

fn full_contraction(t: &[f64], gi: &DMatrix<f64>) -> f64 {
    raise_all(t, gi).iter().zip(t).map(|(a, b)| a * b).sum()
}

/// Curvature package at `u`, with metric derivatives at steps `fd_step` and
/// `fd_step / 2` combined by one Richardson step.
pub fn curvature_at<C: Chart + ?Sized>(chart: &C, u: &[f64], fd_step: f64) -> Result<CurvatureAtPoint> {
    if !(fd_step > 0.0) {
        return Err(Error::StepTooSmall(fd_step));
    }
    if !chart.contains(u, 2.0 * fd_step) {
        return Err(Error::OutOfDomain);
    }
    let n = chart.dim();
    let g = metric_at(chart, u)?;
    let gi = g.clone().try_inverse().ok_or(Error::SingularMetric(0.0))?;
    let (dg1, ddg1) = metric_derivatives(chart, u, fd_step);
    let (dg2, ddg2) = metric_derivatives(chart, u, 0.5 * fd_step);
    let rich = |a: &DMatrix<f64>, b: &DMatrix<f64>| (b * 16.0 - a) / 15.0;
    let dg: Vec<_> = dg1.iter().zip(&dg2).map(|(a, b)| rich(a, b)).collect();
    let ddg: Vec<Vec<_>> =
        ddg1.iter().zip(&ddg2).map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| rich(a, b)).collect()).collect();
    let fine = tensors_from_derivatives(&g, &gi, &dg2, &ddg2);
    let Tensors { christoffel, riemann } = tensors_from_derivatives(&g, &gi, &dg, &ddg);

    let scale = riemann.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let estimate = riemann.iter().zip(&fine.riemann).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let fd_tolerance = estimate.max(1e-9 * scale);

    let ricci = DMatrix::from_fn(n, n, |j, k| {
        let mut s = 0.0;
        for i in 0..n {
            for l in 0..n {
                s += gi[(i, l)] * riemann[i4(n, i, j, k, l)];
            }
        }
        s
    });
    let ricci = (&ricci + ricci.transpose()) * 0.5;
    let scalar = gi.component_mul(&ricci).sum();
    let weyl = if n >= 3 {
        let nf = n as f64;
        let rg = kulkarni_nomizu(&ricci, &g);
        let gg = kulkarni_nomizu(&g, &g);
        riemann
            .iter()
            .zip(rg.iter().zip(&gg))
            .map(|(r, (a, b))| r - a / (nf - 2.0) + scalar * b / (2.0 * (nf - 1.0) * (nf - 2.0)))
            .collect()
    } else {
        vec![0.0; n.pow(4)]
    };
    let weyl_norm_sq = full_contraction(&weyl, &gi).max(0.0);
    let out = CurvatureAtPoint {
        dim: n,
        point: u.to_vec(),
        metric: g.transpose().as_slice().to_vec(),
        inverse_metric: gi.transpose().as_slice().to_vec(),
        christoffel,
        riemann,
        ricci: ricci.transpose().as_slice().to_vec(),
        scalar,
        weyl,
        weyl_norm_sq,
        fd_tolerance,
    };
    let d = invariant_defects(&out);
    if let Some((what, defect)) = d.worst_violation() {
        return Err(Error::SymmetryViolation { what, defect });
    }
    Ok(out)
}

/// Largest violations of the algebraic identities of the curvature package.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvariantDefects {
    pub antisymmetry_first: f64,
    pub antisymmetry_second: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
    /// Largest entry over the six single traces of the Weyl tensor.
    pub weyl_trace: f64,
    /// Allowed defect, `10 fd_tolerance`.
    pub allowed: f64,
}

impl InvariantDefects {
    pub fn worst_violation(&self) -> Option<(&'static str, f64)> {
        [
            ("Riemann antisymmetry in (ij)", self.antisymmetry_first),
            ("Riemann antisymmetry in (kl)", self.antisymmetry_second),
            ("Riemann pair symmetry", self.pair_symmetry),
            ("first Bianchi identity", self.bianchi),
            ("Weyl trace", self.weyl_trace),
        ]
        .into_iter()
        .find(|&(_, v)| !(v <= self.allowed))
    }

    pub fn ok(&self) -> bool {
        self.worst_violation().is_none()
    }
}

pub fn invariant_defects(c: &CurvatureAtPoint) -> InvariantDefects {
    let n = c.dim;
    let gi = DMatrix::from_row_slice(n, n, &c.inverse_metric);
    let (mut a1, mut a2, mut ps, mut bi) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = c.r(i, j, k, l);
                    a1 = a1.max((v + c.r(j, i, k, l)).abs());
                    a2 = a2.max((v + c.r(i, j, l, k)).abs());
                    ps = ps.max((v - c.r(k, l, i, j)).abs());
                    bi = bi.max((v + c.r(j, k, i, l) + c.r(k, i, j, l)).abs());
                }
            }
        }
    }
    let mut tr = 0.0f64;
    let slots = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for &(s, t) in &slots {
        let free: Vec<usize> = (0..4).filter(|x| *x != s && *x != t).collect();
        for x in 0..n {
            for y in 0..n {
                let mut sum = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        let mut idx = [0usize; 4];
                        idx[s] = a;
                        idx[t] = b;
                        idx[free[0]] = x;
                        idx[free[1]] = y;
                        sum += gi[(a, b)] * c.w(idx[0], idx[1], idx[2], idx[3]);
                    }
                }
                tr = tr.max(sum.abs());
            }
        }
    }
    InvariantDefects {
        antisymmetry_first: a1,
        antisymmetry_second: a2,
        pair_symmetry: ps,
        bianchi: bi,
        weyl_trace: tr,
        allowed: 10.0 * c.fd_tolerance,
    }
}

/// `|W|^2 = W_{ijkl} W^{ijkl}`.
pub fn weyl_norm(c: &CurvatureAtPoint) -> Result<f64> {
    if c.dim < 4 {
        return Err(Error::DimensionTooLow { dim: c.dim, min: 4 });
    }
    Ok(c.weyl_norm_sq)
}

/// `(max |W|^2 <= tol, max |W|^2)` over the sample points.
pub fn lcf_check<C: Chart + ?Sized>(chart: &C, samples: &[Vec<f64>], tol: f64, fd_step: f64) -> Result<(bool, f64)> {
    if chart.dim() < 4 {
        return Err(Error::DimensionTooLow { dim: chart.dim(), min: 4 });
    }
    let mut worst = 0.0f64;
    for u in samples {
        worst = worst.max(weyl_norm(&curvature_at(chart, u, fd_step)?)?);
    }
    Ok((worst <= tol, worst))
}

/// Curvature in an orthonormal frame at the point, as normal-coordinate data.
///
/// The exported tensor is `R_{abcd}` of the data convention, which equals
/// `R_{abdc}` here, so that positive sectional curvature reads `R_{abab} > 0`.
/// Frame errors are removed by projecting onto the algebraic curvature tensors.
pub fn to_curvature_data(c: &CurvatureAtPoint) -> Result<CurvatureData> {
    let n = c.dim;
    let g = c.metric_matrix();
    let chol = g.cholesky().ok_or(Error::SingularMetric(0.0))?;
    // columns of L^{-T} are orthonormal
    let frame = chol.l().try_inverse().ok_or(Error::SingularMetric(0.0))?.transpose();
    let mut t = c.riemann.clone();
    for slot in 0..4 {
        let stride = n.pow(3 - slot as u32);
        let mut next = vec![0.0; t.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let a = (idx / stride) % n;
            let base = idx - a * stride;
            *out = (0..n).map(|b| frame[(b, a)] * t[base + b * stride]).sum();
        }
        t = next;
    }
    let at = |t: &[f64], i, j, k, l| t[i4(n, i, j, k, l)];
    let mut sym = vec![0.0; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let anti = |a, b, c2, d| {
                        (at(&t, a, b, c2, d) - at(&t, b, a, c2, d) - at(&t, a, b, d, c2) + at(&t, b, a, d, c2)) / 4.0
                    };
                    sym[i4(n, i, j, k, l)] = 0.5 * (anti(i, j, k, l) + anti(k, l, i, j));
                }
            }
        }
    }
    let mut data = vec![0.0; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let b = (at(&sym, i, j, k, l) + at(&sym, j, k, i, l) + at(&sym, k, i, j, l)) / 3.0;
                    // data index order (a, b, c, d) = (i, j, l, k)
                    data[i4(n, i, j, l, k)] = at(&sym, i, j, k, l) - b;
                }
            }
        }
    }
    let out = christoffel_from_riemann(n, data, c.scalar);
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::ManifoldSpec;
    use super::*;

    #[test]
    fn kulkarni_nomizu_of_metric_is_round_curvature() {
        let g = DMatrix::<f64>::identity(3, 3);
        let gg = kulkarni_nomizu(&g, &g);
        // R_{0110} = K for K = 1/2 g.g with K = 1
        assert_eq!(0.5 * gg[i4(3, 0, 1, 1, 0)], 1.0);
        assert_eq!(0.5 * gg[i4(3, 0, 1, 0, 1)], -1.0);
    }

    #[test]
    fn round_s3_curvature() {
        let c = curvature_at(&ManifoldSpec::Sphere { dim: 3, radius: 2.0 }, &[0.8, 1.2, 0.4], DEFAULT_FD_STEP).unwrap();
        assert!((c.scalar - 6.0 / 4.0).abs() < 1e-8, "{}", c.scalar);
    }

    #[test]
    fn data_export_of_round_sphere() {
        let c = curvature_at(&ManifoldSpec::sphere(4), &[0.8, 1.2, 2.0, 0.4], DEFAULT_FD_STEP).unwrap();
        let d = to_curvature_data(&c).unwrap();
        let reference = CurvatureData::unit_sphere(4);
        let err = d.riemann.iter().zip(&reference.riemann).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }
}
