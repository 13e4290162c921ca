//! Shell integrals of the tower: interaction, shell norms, the nonlinear cross
//! term and the flat-space energy.

use super::{annuli, ln_superadditive_gap, LnTower, TowerConfig};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_ln_radial, integrate_radial, LnShell, RadialIntegrand, RadialInterval};
use crate::scaled::Scaled;
use serde::Serialize;

/// `int_{shell} exp(ln_f(ln |x|)) dx` as a [`Scaled`] number.
pub fn shell_integral_ln<G: Fn(f64) -> f64>(
    ln_f: G,
    shell: LnShell,
    dim: usize,
    ln_scale: f64,
    rel_tol: f64,
) -> Result<Scaled> {
    let q = integrate_ln_radial(ln_f, shell, dim, ln_scale, rel_tol)?;
    Ok(Scaled::from_ln(q.ln_value))
}

/// Sum of a log-integrand over every shell of the annuli decomposition.
fn over_annuli<G: Fn(f64) -> f64>(cfg: &TowerConfig, ln_f: G, ln_scale: f64, rel_tol: f64) -> Result<Scaled> {
    let ann = annuli(cfg)?;
    let parts = (1..=ann.len())
        .map(|h| shell_integral_ln(&ln_f, ann.ln_shell(h), cfg.dim, ln_scale, rel_tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(Scaled::sum(parts))
}

/// `int_{A_{l-1}} W_{l-1}^p W_l dx`.
pub fn interaction_integral(cfg: &TowerConfig, ell: usize, rel_tol: f64) -> Result<Scaled> {
    cfg.check_level(ell)?;
    let tw = LnTower::new(cfg)?;
    let ann = annuli(cfg)?;
    let (outer, inner) = (ell - 2, ell - 1);
    let p = tw.prof.p;
    let f = |t: f64| {
        let cut = tw.cut(t);
        p * tw.ln_w(outer, t, &cut) + tw.ln_w(inner, t, &cut)
    };
    shell_integral_ln(f, ann.ln_shell(ell - 1), cfg.dim, tw.ln_mu[inner], rel_tol)
}

/// `|W_j|_{q, A_h} = (int_{A_h} W_j^q)^{1/q}` with 1-based `j` and `h`.
pub fn annulus_norm(cfg: &TowerConfig, j: usize, q: f64, h: usize, rel_tol: f64) -> Result<Scaled> {
    let k = cfg.k();
    if j == 0 || j > k {
        return Err(Error::IndexOutOfRange { what: "bubble", index: j, lo: 1, hi: k });
    }
    if h == 0 || h > k {
        return Err(Error::IndexOutOfRange { what: "shell", index: h, lo: 1, hi: k });
    }
    if !(q >= 1.0) {
        return Err(Error::Invalid(format!("exponent q = {q} < 1")));
    }
    let tw = LnTower::new(cfg)?;
    let ann = annuli(cfg)?;
    let f = |t: f64| {
        let cut = tw.cut(t);
        q * tw.ln_w(j - 1, t, &cut)
    };
    Ok(shell_integral_ln(f, ann.ln_shell(h), cfg.dim, tw.ln_mu[j - 1], rel_tol)?.powf(1.0 / q))
}

/// `L^{2N/(N+2)}(B(0, r0))` norm of `f(S_l) - f(S_{l-1}) - f(W_l)`, `S_l = sum_{i <= l} W_i`.
pub fn error_component_ii(cfg: &TowerConfig, ell: usize, rel_tol: f64) -> Result<Scaled> {
    cfg.check_level(ell)?;
    let tw = LnTower::new(cfg)?;
    let n = cfg.dim as f64;
    let q = 2.0 * n / (n + 2.0);
    let p = tw.prof.p;
    let f = |t: f64| {
        let cut = tw.cut(t);
        let below = tw.ln_partial_sum(ell - 1, t, &cut);
        let top = tw.ln_w(ell - 1, t, &cut);
        q * ln_superadditive_gap(below, top, p)
    };
    Ok(over_annuli(cfg, f, tw.ln_mu[ell - 1], rel_tol)?.powf(1.0 / q))
}

/// Contributions to `J(W_1 + ... + W_l) - J(W_1 + ... + W_{l-1}) - K_N^{-N}/N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelBreakdown {
    /// `eps/2 int W_l^2`.
    pub mass: Scaled,
    /// `J_0(W_l) - J_0(U_{mu_l})`, the cost of the cutoff.
    pub cutoff: Scaled,
    /// `sum_{i<l} int grad W_i . grad W_l`.
    pub gradient_cross: Scaled,
    /// `eps sum_{i<l} int W_i W_l`.
    pub mass_cross: Scaled,
    /// `1/(p+1) int [S_l^{p+1} - S_{l-1}^{p+1} - W_l^{p+1}]`, entering with a minus sign.
    pub nonlinear_cross: Scaled,
    pub total: Scaled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatEnergy {
    /// `K_N^{-N}` by quadrature.
    pub kn_pow: f64,
    /// `k K_N^{-N} / N`.
    pub bubble_energy: f64,
    pub levels: Vec<LevelBreakdown>,
    /// `J_eps(sum W_j) - k K_N^{-N}/N`.
    pub excess: Scaled,
    pub total: f64,
}

/// Flat-space energy `1/2 int |grad S|^2 + eps/2 int S^2 - 1/(p+1) int S^{p+1}` of the tower.
///
/// Computed as `k K_N^{-N}/N` plus per-level corrections, each a signed sum of
/// positive shell integrals, so that corrections far below `K_N^{-N}` keep
/// their relative accuracy.
pub fn flat_energy(cfg: &TowerConfig, rel_tol: f64) -> Result<FlatEnergy> {
    if cfg.include_v_envelope {
        return Err(Error::Invalid("flat energy is defined for the bubbles-only tower".into()));
    }
    let tw = LnTower::new(cfg)?;
    let prof = tw.prof;
    let n = cfg.dim as f64;
    let p = prof.p;
    let kn_pow = integrate_radial(
        &RadialIntegrand::new(|r| prof.value(r).powf(p + 1.0), 2.0 * n),
        RadialInterval::whole_space(),
        cfg.dim,
        rel_tol,
    )?
    .value;
    let ln_eps = cfg.eps.ln();
    let ln_half = 0.5f64.ln();
    let ln_p1 = (p + 1.0).ln();
    let ball = LnShell { ln_inner: f64::NEG_INFINITY, ln_outer: tw.ln_r0 };
    let ramp = LnShell { ln_inner: tw.ln_half_r0, ln_outer: tw.ln_r0 };
    let exterior = LnShell { ln_inner: tw.ln_r0, ln_outer: f64::INFINITY };
    let int = |f: &dyn Fn(f64) -> f64, shell: LnShell, scale: f64| shell_integral_ln(f, shell, cfg.dim, scale, rel_tol);

    let mut levels = Vec::with_capacity(cfg.k());
    for l in 0..cfg.k() {
        let lm = tw.ln_mu[l];
        let mass = Scaled::from_ln(ln_eps + ln_half)
            * int(
                &|t| {
                    let c = tw.cut(t);
                    2.0 * tw.ln_w(l, t, &c)
                },
                ball,
                lm,
            )?;

        // Gradient loss (1 - chi^2) P'^2 / 2 on the ramp and beyond.
        let grad_loss = |t: f64| {
            let c = tw.cut(t);
            let (_, dv) = tw.profile(l, t);
            ln_half + c.comp + c.chi.exp().ln_1p() + 2.0 * dv
        };
        let ta = int(&grad_loss, ramp, lm)? + int(&grad_loss, exterior, lm)?;
        let tb = int(
            &|t| {
                let c = tw.cut(t);
                let (v, dv) = tw.profile(l, t);
                c.chi + c.dchi + v + dv
            },
            ramp,
            lm,
        )?;
        let tc = int(
            &|t| {
                let c = tw.cut(t);
                let (v, _) = tw.profile(l, t);
                ln_half + 2.0 * c.dchi + 2.0 * v
            },
            ramp,
            lm,
        )?;
        let pot_loss = |t: f64| {
            let c = tw.cut(t);
            let (v, _) = tw.profile(l, t);
            let loss = if c.chi == f64::NEG_INFINITY { 0.0 } else { (-((p + 1.0) * c.chi).exp_m1()).ln() };
            loss - ln_p1 + (p + 1.0) * v
        };
        let td = int(&pot_loss, ramp, lm)? + int(&pot_loss, exterior, lm)?;
        let cutoff = Scaled::sum([-ta, tb, tc, td]);

        let (mut gradient_cross, mut mass_cross, mut nonlinear_cross) = (Scaled::ZERO, Scaled::ZERO, Scaled::ZERO);
        if l > 0 {
            let mut g = Vec::new();
            let mut m = Vec::new();
            for i in 0..l {
                g.push(over_annuli(
                    cfg,
                    |t| {
                        let c = tw.cut(t);
                        tw.ln_dw(i, t, &c) + tw.ln_dw(l, t, &c)
                    },
                    lm,
                    rel_tol,
                )?);
                m.push(
                    Scaled::from_ln(ln_eps)
                        * over_annuli(
                            cfg,
                            |t| {
                                let c = tw.cut(t);
                                tw.ln_w(i, t, &c) + tw.ln_w(l, t, &c)
                            },
                            lm,
                            rel_tol,
                        )?,
                );
            }
            gradient_cross = Scaled::sum(g);
            mass_cross = Scaled::sum(m);
            nonlinear_cross = over_annuli(
                cfg,
                |t| {
                    let c = tw.cut(t);
                    ln_superadditive_gap(tw.ln_partial_sum(l, t, &c), tw.ln_w(l, t, &c), p + 1.0) - ln_p1
                },
                lm,
                rel_tol,
            )?;
        }
        let total = Scaled::sum([mass, cutoff, gradient_cross, mass_cross, -nonlinear_cross]);
        levels.push(LevelBreakdown { mass, cutoff, gradient_cross, mass_cross, nonlinear_cross, total });
    }
    let excess = Scaled::sum(levels.iter().map(|l| l.total));
    let bubble_energy = cfg.k() as f64 * kn_pow / n;
    Ok(FlatEnergy { kn_pow, bubble_energy, total: bubble_energy + excess.to_f64(), levels, excess })
}
