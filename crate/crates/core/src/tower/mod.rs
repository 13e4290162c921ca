//! The k-bubble tower `sum_j chi(|x|) mu_j^{-(N-2)/2} U(x / mu_j)` with
//! `mu_j = d_j eps^{gamma_j}`.
//!
//! Scales drop below the double range quickly (`N = 7`, `k = 3`, `eps = 1e-4`
//! gives `mu_3 = 1e-98`), so the tower is evaluated through logarithms:
//! `ln W_j(r)` as a function of `ln r`. Integrals are returned as [`Scaled`].

mod integrals;
mod sweep;

pub use integrals::{
    annulus_norm, error_component_ii, flat_energy, interaction_integral, shell_integral_ln, FlatEnergy,
};
pub use sweep::{eps_grid, run_sweep, slope_fit, slope_fit_all, SlopeFit, SweepPoint, SweepQuantity, SweepSeries};

use crate::bubble::BubbleProfile;
use crate::constants::exponent_schedule;
use crate::error::{Error, Result};
use crate::quadrature::{LnShell, RadialInterval};
use crate::scaled::Scaled;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CutoffProfile {
    /// `1 - S(s)`, `S = 6s^5 - 15s^4 + 10s^3`, `s = (r^2/r0^2 - 1/4) / (3/4)`.
    #[default]
    SmoothstepQuintic,
    /// `1 - S(s)` with `S = phi(s) / (phi(s) + phi(1-s))`, `phi(t) = exp(-1/t)`.
    ExpBump,
}

/// Radial cutoff equal to 1 on `[0, r0/2]` and 0 on `[r0, inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub r0: f64,
    #[serde(default)]
    pub profile: CutoffProfile,
}

impl CutoffSpec {
    pub fn new(r0: f64, profile: CutoffProfile) -> Self {
        CutoffSpec { r0, profile }
    }

    fn transition(&self, r: f64) -> f64 {
        ((r * r) / (self.r0 * self.r0) - 0.25) / 0.75
    }

    /// Step `S(s)` rising from 0 to 1, and `dS/ds`.
    fn step(&self, s: f64) -> (f64, f64) {
        match self.profile {
            CutoffProfile::SmoothstepQuintic => {
                let s2 = s * s;
                let v = s2 * s * (10.0 + s * (-15.0 + 6.0 * s));
                let dv = 30.0 * s2 * (1.0 - s) * (1.0 - s);
                (v, dv)
            }
            CutoffProfile::ExpBump => {
                // ratio = phi(1-s)/phi(s) = exp(1/s - 1/(1-s))
                let e = 1.0 / s - 1.0 / (1.0 - s);
                let v = if e > 0.0 { (-e).exp() / (1.0 + (-e).exp()) } else { 1.0 / (1.0 + e.exp()) };
                let dv = (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s))) * v * (1.0 - v);
                (v, dv)
            }
        }
    }

    /// `(chi, 1 - chi, chi')` at radius `r`; `chi` is exactly 1 on `[0, r0/2]`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        if r <= 0.5 * self.r0 {
            return (1.0, 0.0, 0.0);
        }
        if r >= self.r0 {
            return (0.0, 1.0, 0.0);
        }
        let s = self.transition(r);
        // Both profiles satisfy S(1-s) = 1 - S(s); evaluating each side directly
        // keeps full relative accuracy near both ends.
        let (comp, ds) = self.step(s);
        let (chi, _) = self.step(1.0 - s);
        let dsdr = 2.0 * r / (0.75 * self.r0 * self.r0);
        (chi, comp, -ds * dsdr)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }
}

/// Tower parameters. `d` has one height per bubble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerConfig {
    pub dim: usize,
    pub d: Vec<f64>,
    pub eps: f64,
    pub cutoff: CutoffSpec,
    /// Add the `mu_j^2` times decay-envelope term to each bubble.
    #[serde(default)]
    pub include_v_envelope: bool,
    #[serde(default = "default_c_env")]
    pub c_env: f64,
}

fn default_c_env() -> f64 {
    1.0
}

impl TowerConfig {
    /// Bubbles-only tower with the default quintic cutoff.
    pub fn new(dim: usize, d: Vec<f64>, eps: f64, r0: f64) -> Result<Self> {
        let cfg = TowerConfig {
            dim,
            d,
            eps,
            cutoff: CutoffSpec::new(r0, CutoffProfile::SmoothstepQuintic),
            include_v_envelope: false,
            c_env: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn k(&self) -> usize {
        self.d.len()
    }

    pub fn r0(&self) -> f64 {
        self.cutoff.r0
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        TowerConfig { eps, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 7 {
            return Err(Error::DimensionTooLow { dim: self.dim, min: 7 });
        }
        if self.d.is_empty() {
            return Err(Error::Invalid("tower needs at least one bubble".into()));
        }
        if self.d.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::Invalid("heights d_j must be positive and finite".into()));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Invalid(format!("eps = {} must be positive", self.eps)));
        }
        if !(self.cutoff.r0 > 0.0 && self.cutoff.r0.is_finite()) {
            return Err(Error::Invalid("cutoff radius must be positive".into()));
        }
        Ok(())
    }

    /// `ln mu_j = ln d_j + gamma_j ln eps`.
    pub fn ln_mu(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let sched = exponent_schedule(self.dim, self.k())?;
        Ok(sched.gamma_f64().iter().zip(&self.d).map(|(g, d)| d.ln() + g * self.eps.ln()).collect())
    }

    /// `ln(mu_l / mu_{l-1})` for `2 <= l <= k`.
    pub fn ln_ratio(&self, ell: usize) -> Result<f64> {
        self.check_level(ell)?;
        let m = self.ln_mu()?;
        Ok(m[ell - 1] - m[ell - 2])
    }

    fn check_level(&self, ell: usize) -> Result<()> {
        if ell < 2 || ell > self.k() {
            return Err(Error::IndexOutOfRange { what: "tower level", index: ell, lo: 2, hi: self.k() });
        }
        Ok(())
    }

    /// Problems that leave the configuration computable but outside the regime
    /// where the ansatz is meaningful.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if let Ok(m) = self.ln_mu() {
            if m[0] >= (0.5 * self.r0()).ln() {
                w.push(format!("mu_1 = {:e} is not below r0/2 = {}", m[0].exp(), 0.5 * self.r0()));
            }
        }
        w
    }
}

/// `mu_1, ..., mu_k` as doubles (deep levels may underflow to 0; see [`TowerConfig::ln_mu`]).
pub fn mu_schedule(cfg: &TowerConfig) -> Result<Vec<f64>> {
    Ok(cfg.ln_mu()?.into_iter().map(f64::exp).collect())
}

/// Disjoint shells `A_h = [sqrt(mu_h mu_{h+1}), sqrt(mu_{h-1} mu_h))`, `h = 1..k`,
/// with `mu_0 = r0^2 / mu_1` and `mu_{k+1} = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnuliDecomposition {
    pub shells: Vec<RadialInterval>,
    /// Logarithmic bounds `(ln inner, ln outer)`; `ln inner = -inf` for the ball.
    pub ln_bounds: Vec<(f64, f64)>,
}

impl AnnuliDecomposition {
    pub fn ln_shell(&self, h: usize) -> LnShell {
        let (a, b) = self.ln_bounds[h - 1];
        LnShell { ln_inner: a, ln_outer: b }
    }

    pub fn len(&self) -> usize {
        self.shells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shells.is_empty()
    }
}

pub fn annuli(cfg: &TowerConfig) -> Result<AnnuliDecomposition> {
    let m = cfg.ln_mu()?;
    let ln_r0 = cfg.r0().ln();
    let ln_mu0 = 2.0 * ln_r0 - m[0];
    let mut chain = Vec::with_capacity(m.len() + 1);
    chain.push(ln_mu0);
    chain.extend_from_slice(&m);
    if chain.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::NonMonotoneScales);
    }
    let k = m.len();
    let mut ln_bounds = Vec::with_capacity(k);
    for h in 1..=k {
        let outer = if h == 1 { ln_r0 } else { 0.5 * (chain[h - 1] + chain[h]) };
        let inner = if h == k { f64::NEG_INFINITY } else { 0.5 * (chain[h] + chain[h + 1]) };
        ln_bounds.push((inner, outer));
    }
    let shells = ln_bounds.iter().map(|&(a, b)| RadialInterval { inner: a.exp(), outer: b.exp() }).collect();
    Ok(AnnuliDecomposition { shells, ln_bounds })
}

/// Precomputed log-space evaluator of the tower.
pub(crate) struct LnTower {
    pub prof: BubbleProfile,
    pub ln_mu: Vec<f64>,
    pub cutoff: CutoffSpec,
    pub ln_r0: f64,
    pub ln_half_r0: f64,
    ln_alpha: f64,
    ln_2a_alpha: f64,
    envelope: Option<f64>,
}

/// Logarithms of the cutoff factors at one radius.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LnCut {
    /// `ln chi`.
    pub chi: f64,
    /// `ln |chi'|`.
    pub dchi: f64,
    /// `ln (1 - chi)`.
    pub comp: f64,
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

pub(crate) fn ln_sum(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, ln_add)
}

/// `ln[(x + y)^e - x^e - y^e]` for `e > 1` from `ln x`, `ln y`.
pub(crate) fn ln_superadditive_gap(lx: f64, ly: f64, e: f64) -> f64 {
    let (hi, lo) = if lx >= ly { (lx, ly) } else { (ly, lx) };
    if lo == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let delta = lo - hi;
    // (1 + t)^e - 1 - t^e with t = e^delta <= 1; ~ e t for small t.
    let ln_inner = if delta < -36.0 {
        e.ln() + delta
    } else {
        let v = (delta.exp().ln_1p() * e).exp_m1() - (delta * e).exp();
        if v > 0.0 {
            v.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    e * hi + ln_inner
}

impl LnTower {
    pub fn new(cfg: &TowerConfig) -> Result<Self> {
        let prof = BubbleProfile::new(cfg.dim)?;
        Ok(LnTower {
            prof,
            ln_mu: cfg.ln_mu()?,
            cutoff: cfg.cutoff,
            ln_r0: cfg.r0().ln(),
            ln_half_r0: (0.5 * cfg.r0()).ln(),
            ln_alpha: prof.alpha.ln(),
            ln_2a_alpha: (2.0 * prof.a * prof.alpha).ln(),
            envelope: cfg.include_v_envelope.then_some(cfg.c_env),
        })
    }

    pub fn cut(&self, t: f64) -> LnCut {
        if t <= self.ln_half_r0 {
            return LnCut { chi: 0.0, dchi: f64::NEG_INFINITY, comp: f64::NEG_INFINITY };
        }
        if t >= self.ln_r0 {
            return LnCut { chi: f64::NEG_INFINITY, dchi: f64::NEG_INFINITY, comp: 0.0 };
        }
        let (chi, comp, d) = self.cutoff.eval(t.exp());
        LnCut { chi: chi.ln(), dchi: d.abs().ln(), comp: comp.ln() }
    }

    /// `ln(mu^2 + r^2)`.
    fn ln_quad(lm: f64, t: f64) -> f64 {
        let hi = lm.max(t);
        2.0 * hi + (-2.0 * (lm - t).abs()).exp().ln_1p()
    }

    /// `ln P_j(r)` and `ln |P_j'(r)|` for the uncut profile of bubble `j` (0-based).
    pub fn profile(&self, j: usize, t: f64) -> (f64, f64) {
        let lm = self.ln_mu[j];
        let a = self.prof.a;
        let lq = Self::ln_quad(lm, t);
        let mut v = self.ln_alpha + a * lm - a * lq;
        let mut dv = self.ln_2a_alpha + a * lm + t - (a + 1.0) * lq;
        if let Some(c) = self.envelope {
            let n = self.prof.dim as f64;
            v = ln_add(v, c.ln() + a * lm - 0.5 * (n - 4.0) * lq);
            dv = ln_add(dv, (c * (n - 4.0)).ln() + a * lm + t - 0.5 * (n - 2.0) * lq);
        }
        (v, dv)
    }

    /// `ln W_j(r)`.
    pub fn ln_w(&self, j: usize, t: f64, cut: &LnCut) -> f64 {
        cut.chi + self.profile(j, t).0
    }

    /// `ln |W_j'(r)|` with `|W'| = chi |P'| + |chi'| P`.
    pub fn ln_dw(&self, j: usize, t: f64, cut: &LnCut) -> f64 {
        let (v, dv) = self.profile(j, t);
        ln_add(cut.chi + dv, cut.dchi + v)
    }

    /// `ln sum_{i < upto} W_i(r)`.
    pub fn ln_partial_sum(&self, upto: usize, t: f64, cut: &LnCut) -> f64 {
        cut.chi + ln_sum((0..upto).map(|i| self.profile(i, t).0))
    }
}

/// Tower value at a point.
pub fn tower_eval(cfg: &TowerConfig, x: &[f64]) -> Result<f64> {
    if x.len() != cfg.dim {
        return Err(Error::Invalid("point dimension mismatch".into()));
    }
    let tw = LnTower::new(cfg)?;
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let chi = cfg.cutoff.value(r);
    if chi == 0.0 {
        return Ok(0.0);
    }
    let t = r.ln();
    let sum: f64 = (0..cfg.k()).map(|j| tw.profile(j, t).0.exp()).sum();
    Ok(chi * sum)
}

/// Tower value at radius `r` as a [`Scaled`] number (never underflows).
pub fn tower_eval_scaled(cfg: &TowerConfig, r: f64) -> Result<Scaled> {
    let tw = LnTower::new(cfg)?;
    let t = r.ln();
    let cut = tw.cut(t);
    Ok(Scaled::from_ln(tw.ln_partial_sum(cfg.k(), t, &cut)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        for prof in [CutoffProfile::SmoothstepQuintic, CutoffProfile::ExpBump] {
            let c = CutoffSpec::new(2.0, prof);
            assert_eq!(c.eval(1.0), (1.0, 0.0, 0.0));
            assert_eq!(c.eval(2.0).0, 0.0);
            let mut prev = 1.0;
            for i in 1..100 {
                let r = 1.0 + i as f64 / 100.0;
                let (chi, comp, d) = c.eval(r);
                assert!(chi <= prev && (0.0..=1.0).contains(&chi));
                assert!((chi + comp - 1.0).abs() < 1e-14);
                let h = 1e-6;
                let fd = (c.value(r + h) - c.value(r - h)) / (2.0 * h);
                assert!((fd - d).abs() < 1e-6 * (1.0 + d.abs()), "{prof:?} r={r}: {fd} vs {d}");
                prev = chi;
            }
        }
    }

    #[test]
    fn superadditive_gap_matches_direct() {
        let e: f64 = 9.0 / 5.0;
        for (x, y) in [(1.0f64, 0.5f64), (3.0, 1e-3), (2.0, 2.0)] {
            let direct = (x + y).powf(e) - x.powf(e) - y.powf(e);
            let l = ln_superadditive_gap(f64::ln(x), f64::ln(y), e);
            assert!((l.exp() - direct).abs() <= 1e-12 * direct.abs(), "{x} {y}");
        }
        // First-order term e x^{e-1} y once y/x is below double resolution.
        let l = ln_superadditive_gap(0.0, -46.0, e);
        assert!((l - (e.ln() - 46.0)).abs() < 1e-12);
        let l = ln_superadditive_gap(-800.0, -2000.0, e);
        assert!((l - (e.ln() + (e - 1.0) * -800.0 - 2000.0)).abs() < 1e-9);
    }

    #[test]
    fn ln_profile_matches_direct_bubble() {
        let cfg = TowerConfig::new(7, vec![1.0, 2.0], 1e-2, 1.0).unwrap();
        let tw = LnTower::new(&cfg).unwrap();
        let mu = mu_schedule(&cfg).unwrap();
        for r in [1e-9, 1e-4, 0.01, 0.3] {
            for j in 0..2 {
                let (v, dv) = tw.profile(j, f64::ln(r));
                let direct = mu[j].powf(-tw.prof.a) * tw.prof.value(r / mu[j]);
                let ddirect = mu[j].powf(-tw.prof.a - 1.0) * tw.prof.radial_derivative(r / mu[j]);
                assert!((v.exp() / direct - 1.0).abs() < 1e-12);
                assert!((dv.exp() / ddirect.abs() - 1.0).abs() < 1e-12);
            }
        }
    }
}
