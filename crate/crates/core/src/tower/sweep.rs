//! Epsilon sweeps and log-log slope fits.

use super::{annulus_norm, error_component_ii, interaction_integral, TowerConfig};
use crate::error::{Error, Result};
use crate::scaled::Scaled;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepQuantity {
    /// `int_{A_{l-1}} f(W_{l-1}) W_l`.
    Interaction { ell: usize },
    /// `|W_j|_{q, A_h}`.
    Norm { j: usize, h: usize, q: f64 },
    /// Cross-term norm of level `ell`.
    ErrorII { ell: usize },
}

impl SweepQuantity {
    /// Level whose ratio `mu_l / mu_{l-1}` is the abscissa.
    pub fn ratio_level(&self) -> usize {
        match *self {
            SweepQuantity::Interaction { ell } | SweepQuantity::ErrorII { ell } => ell,
            SweepQuantity::Norm { j, .. } => j.max(2),
        }
    }

    pub fn evaluate(&self, cfg: &TowerConfig, rel_tol: f64) -> Result<Scaled> {
        match *self {
            SweepQuantity::Interaction { ell } => interaction_integral(cfg, ell, rel_tol),
            SweepQuantity::Norm { j, h, q } => annulus_norm(cfg, j, q, h, rel_tol),
            SweepQuantity::ErrorII { ell } => error_component_ii(cfg, ell, rel_tol),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub ln_ratio: f64,
    pub value: Scaled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSeries {
    pub quantity: SweepQuantity,
    pub points: Vec<SweepPoint>,
}

impl SweepSeries {
    pub fn eps_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.eps).collect()
    }
}

/// `per_decade` log-spaced values from `hi` down to `lo`, both included.
pub fn eps_grid(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || per_decade == 0 {
        return Err(Error::Invalid(format!("bad eps grid [{lo:e}, {hi:e}] x {per_decade}")));
    }
    let decades = (hi / lo).log10();
    let steps = (decades * per_decade as f64).round().max(1.0) as usize;
    let (l0, l1) = (hi.log10(), lo.log10());
    Ok((0..=steps).map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / steps as f64)).collect())
}

/// Evaluates `quantity` at every grid value, in parallel, in grid order.
pub fn run_sweep(base: &TowerConfig, quantity: SweepQuantity, grid: &[f64], rel_tol: f64) -> Result<SweepSeries> {
    if grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Invalid("eps grid must be strictly decreasing".into()));
    }
    let ell = quantity.ratio_level();
    let points = grid
        .par_iter()
        .map(|&eps| {
            let cfg = base.with_eps(eps);
            let value = quantity.evaluate(&cfg, rel_tol)?;
            let ln_ratio = cfg.ln_ratio(ell)?;
            Ok(SweepPoint { eps, ln_ratio, value })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepSeries { quantity, points })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points_used: usize,
}

/// Ordinary least squares of `y` on `x`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewPoints { need: 3, got: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok(SlopeFit { slope, intercept, stderr, points_used: n })
}

fn check(s: &SweepSeries) -> Result<()> {
    if s.points.len() < 4 {
        return Err(Error::TooFewPoints { need: 4, got: s.points.len() });
    }
    if let Some(i) = s.points.iter().position(|p| p.value.signum() <= 0.0) {
        return Err(Error::NonPositiveValue(i));
    }
    Ok(())
}

/// Slope of `ln value` against `ln ratio` after dropping the largest-eps quartile.
pub fn slope_fit(s: &SweepSeries) -> Result<SlopeFit> {
    check(s)?;
    let mut pts = s.points.clone();
    pts.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let kept = &pts[pts.len() / 4..];
    let x: Vec<f64> = kept.iter().map(|p| p.ln_ratio).collect();
    let y: Vec<f64> = kept.iter().map(|p| p.value.ln_abs()).collect();
    least_squares(&x, &y)
}

/// Slope over every point, against `ln ratio` or, with `against_eps`, `ln eps`.
pub fn slope_fit_all(s: &SweepSeries, against_eps: bool) -> Result<SlopeFit> {
    check(s)?;
    let x: Vec<f64> = s.points.iter().map(|p| if against_eps { p.eps.ln() } else { p.ln_ratio }).collect();
    let y: Vec<f64> = s.points.iter().map(|p| p.value.ln_abs()).collect();
    least_squares(&x, &y)
}
