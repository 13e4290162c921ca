//! Reduced energy of the tower heights and its sequential maximiser.
//!
//! The model is
//! `D + eps^{theta_1} G_1(d_1) + sum_{l >= 2} eps^{theta_l} G_l(d_{l-1}, d_l)` with
//! `G_1(d) = -A |W|^2 d^4 + B d^2` and `G_l = -C (d_l / d_{l-1})^{(N-2)/2} + B d_l^2`.
//! Heights in a tall tower range over hundreds of decades, so most internals
//! work with logarithms of heights and with objectives divided by `d_l^2`.

use crate::bubble::half_power;
use crate::constants::{exponent_schedule, EnergyConstants, ExponentSchedule};
use crate::error::{Error, Result};
use crate::scaled::Scaled;
use nalgebra::{DMatrix, SymmetricEigen};
use num::ToPrimitive;
use serde::Serialize;
use twofloat::TwoFloat;

/// Which value of the interaction constant `C` the model uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionSource {
    /// The closed form in terms of sphere areas.
    #[default]
    ClosedForm,
    /// `alpha_N int U^p |y|^{2-N}` by quadrature.
    Quadrature,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedModel {
    pub dim: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Constant term `k K_N^{-N} / N`.
    pub d: f64,
    pub weyl_sq: f64,
    pub schedule: ExponentSchedule,
}

impl ReducedModel {
    pub fn new(consts: &EnergyConstants, k: usize, weyl_sq: f64, source: InteractionSource) -> Result<Self> {
        let c = match source {
            InteractionSource::ClosedForm => consts.c_n,
            InteractionSource::Quadrature => consts.c_hat,
        };
        Self::from_parts(consts.dim, k, consts.a_n, consts.b_n, c, k as f64 * consts.d_n_per_bubble, weyl_sq)
    }

    pub fn from_parts(dim: usize, k: usize, a: f64, b: f64, c: f64, d: f64, weyl_sq: f64) -> Result<Self> {
        let schedule = exponent_schedule(dim, k)?;
        for (name, v) in [("A", a), ("B", b), ("C", c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("constant {name} = {v} must be positive")));
            }
        }
        if !(weyl_sq >= 0.0 && weyl_sq.is_finite()) {
            return Err(Error::Invalid(format!("|W|^2 = {weyl_sq} must be non-negative")));
        }
        Ok(ReducedModel { dim, k, a, b, c, d, weyl_sq, schedule })
    }

    /// Same model with `A`, `B`, `C` multiplied by `lambda`.
    pub fn rescaled(&self, lambda: f64) -> Self {
        ReducedModel { a: self.a * lambda, b: self.b * lambda, c: self.c * lambda, ..self.clone() }
    }

    /// Interaction exponent `(N-2)/2`.
    pub fn interaction_power(&self) -> f64 {
        (self.dim as f64 - 2.0) / 2.0
    }

    fn theta(&self) -> Vec<f64> {
        self.schedule.theta_f64()
    }
}

pub fn g1(m: &ReducedModel, d1: f64) -> f64 {
    -m.a * m.weyl_sq * d1.powi(4) + m.b * d1 * d1
}

pub fn g_ell(m: &ReducedModel, d_prev: f64, d: f64) -> f64 {
    -m.c * (d / d_prev).powf(m.interaction_power()) + m.b * d * d
}

/// `G_l` from logarithms of the heights; `level` is 1-based and `ln_prev` is
/// ignored on the first level.
pub fn g_level_scaled(m: &ReducedModel, level: usize, ln_prev: f64, ln_d: f64) -> Scaled {
    let gain = Scaled::from_ln(m.b.ln() + 2.0 * ln_d);
    let loss = if level == 1 {
        Scaled::from(m.a * m.weyl_sq) * Scaled::from_ln(4.0 * ln_d)
    } else {
        Scaled::from_ln(m.c.ln() + m.interaction_power() * (ln_d - ln_prev))
    };
    gain - loss
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedEnergy {
    pub constant: f64,
    /// `eps^{theta_l} G_l`, one entry per level.
    pub terms: Vec<Scaled>,
    /// Sum of the terms, without the constant.
    pub correction: Scaled,
    pub total: f64,
}

pub fn reduced_energy_model(m: &ReducedModel, d: &[f64], eps: f64) -> Result<ReducedEnergy> {
    check_heights(m, d)?;
    if !(eps > 0.0) {
        return Err(Error::Invalid(format!("eps = {eps} must be positive")));
    }
    debug_assert!(m.schedule.theta[0].to_f64() == Some(2.0));
    let theta = m.theta();
    let ln_eps = eps.ln();
    let terms: Vec<Scaled> = (0..m.k)
        .map(|l| {
            let ln_prev = if l == 0 { 0.0 } else { d[l - 1].ln() };
            Scaled::from_ln(theta[l] * ln_eps) * g_level_scaled(m, l + 1, ln_prev, d[l].ln())
        })
        .collect();
    let correction = Scaled::sum(terms.iter().copied());
    Ok(ReducedEnergy { constant: m.d, total: m.d + correction.to_f64(), terms, correction })
}

fn check_heights(m: &ReducedModel, d: &[f64]) -> Result<()> {
    if d.len() != m.k {
        return Err(Error::Invalid(format!("{} heights for a tower of height {}", d.len(), m.k)));
    }
    if let Some(i) = d.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositiveValue(i));
    }
    Ok(())
}

/// `ln d_1^*`, the top of `G_1`.
pub fn ln_first_height(m: &ReducedModel) -> Result<f64> {
    if !(m.weyl_sq > 0.0) {
        return Err(Error::DegenerateWeyl(m.weyl_sq));
    }
    Ok(0.5 * (m.b / (2.0 * m.a * m.weyl_sq)).ln())
}

/// `ln d_l^*` given `ln d_{l-1}`:
/// `d_l = ((N-2) C / (4 B))^{2/(6-N)} d_{l-1}^{(N-2)/(N-6)}`.
pub fn ln_next_height(m: &ReducedModel, ln_prev: f64) -> f64 {
    let n = m.dim as f64;
    2.0 / (6.0 - n) * ((n - 2.0) * m.c / (4.0 * m.b)).ln() + (n - 2.0) / (n - 6.0) * ln_prev
}

/// `G_l / s^2` as a function of `u = d_l / s`, in double-double.
///
/// Level 1 reads `-A |W|^2 s^2 u^4 + B u^2`; higher levels read
/// `-C rho u^{(N-2)/2} + B u^2` with `rho = s^{(N-6)/2} / d_{l-1}^{(N-2)/2}`.
#[derive(Clone, Copy, Debug)]
pub struct LevelObjective {
    level: usize,
    twice_power: i32,
    quartic: TwoFloat,
    loss: TwoFloat,
    gain: TwoFloat,
}

impl LevelObjective {
    pub fn new(m: &ReducedModel, level: usize, ln_prev: f64, ln_scale: f64) -> Self {
        let e = m.interaction_power();
        let gain = TwoFloat::from(m.b);
        if level == 1 {
            let coef = m.a * m.weyl_sq * (2.0 * ln_scale).exp();
            LevelObjective { level, twice_power: 4, quartic: TwoFloat::from(coef), loss: TwoFloat::from(0.0), gain }
        } else {
            let rho = ((e - 2.0) * ln_scale - e * ln_prev).exp();
            LevelObjective {
                level,
                twice_power: m.dim as i32 - 2,
                quartic: TwoFloat::from(0.0),
                loss: TwoFloat::from(m.c) * TwoFloat::from(rho),
                gain,
            }
        }
    }

    pub fn eval(&self, u: f64) -> TwoFloat {
        let x = TwoFloat::from(u);
        let sq = x * x;
        if self.level == 1 {
            -self.quartic * sq * sq + self.gain * sq
        } else {
            -self.loss * half_power(x, self.twice_power) + self.gain * sq
        }
    }
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`, stopped at
/// bracket width `width`.
pub fn golden_section_max<F: Fn(f64) -> TwoFloat>(f: F, lo: f64, hi: f64, width: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > width {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Bracket for the 1-D oracle, relative to the closed-form height.
pub const ORACLE_BRACKET: (f64, f64) = (1e-6, 1e3);
/// Bracket width at which the oracle stops, relative to the closed-form height.
pub const ORACLE_WIDTH: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelMaximum {
    pub level: usize,
    pub d_closed: f64,
    pub ln_d_closed: f64,
    pub d_oracle: f64,
    pub rel_diff: f64,
    /// `G_l` at the closed-form height.
    pub g_max: Scaled,
    /// `G_l''` in `d_l` at the closed-form height.
    pub second_derivative: f64,
    pub concave: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximizationReport {
    pub levels: Vec<LevelMaximum>,
    pub max_rel_diff: f64,
    pub all_concave: bool,
}

/// Closed-form sequential maximiser, each level cross-checked by golden section.
///
/// Level `l` maximises `G_l(d_{l-1}, .)` with `d_{l-1}` frozen at its own
/// maximiser; the oracle chain uses its own previous heights.
pub fn maximize_sequential(m: &ReducedModel) -> Result<(Vec<f64>, MaximizationReport)> {
    let e = m.interaction_power();
    let mut ln_closed = Vec::with_capacity(m.k);
    let mut ln_oracle: Vec<f64> = Vec::with_capacity(m.k);
    let mut levels = Vec::with_capacity(m.k);
    for l in 1..=m.k {
        let ln_d = if l == 1 { ln_first_height(m)? } else { ln_next_height(m, ln_closed[l - 2]) };
        let oracle_prev = if l == 1 { 0.0 } else { ln_oracle[l - 2] };
        let obj = LevelObjective::new(m, l, oracle_prev, ln_d);
        let u = golden_section_max(|u| obj.eval(u), ORACLE_BRACKET.0, ORACLE_BRACKET.1, ORACLE_WIDTH);
        ln_oracle.push(ln_d + u.ln());
        let d_closed = ln_d.exp();
        if !(d_closed > 0.0 && d_closed.is_finite()) {
            return Err(Error::Invalid(format!("height d_{l} = exp({ln_d}) is outside double range")));
        }
        let ln_prev = if l == 1 { 0.0 } else { ln_closed[l - 2] };
        // Second derivatives at the top: G_1'' = -4B and G_l'' = 2B(2 - e).
        let second_derivative = if l == 1 {
            -12.0 * m.a * m.weyl_sq * d_closed * d_closed + 2.0 * m.b
        } else {
            let ln_loss = m.c.ln() + e.ln() + (e - 1.0).ln() + (e - 2.0) * ln_d - e * ln_prev;
            2.0 * m.b - ln_loss.exp()
        };
        levels.push(LevelMaximum {
            level: l,
            d_closed,
            ln_d_closed: ln_d,
            d_oracle: d_closed * u,
            rel_diff: (u - 1.0).abs(),
            g_max: g_level_scaled(m, l, ln_prev, ln_d),
            second_derivative,
            concave: second_derivative < 0.0,
        });
        ln_closed.push(ln_d);
    }
    let d_star = levels.iter().map(|l| l.d_closed).collect();
    let max_rel_diff = levels.iter().map(|l| l.rel_diff).fold(0.0, f64::max);
    let all_concave = levels.iter().all(|l| l.concave);
    Ok((d_star, MaximizationReport { levels, max_rel_diff, all_concave }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenSummary {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub scaled_hessian: Vec<Vec<f64>>,
}

/// Smallest relative step accepted by [`hessian_check`].
pub const MIN_FD_STEP: f64 = 1e-6;

/// Negative-definiteness of the Hessian of `sum_l eps^{theta_l} G_l` at `d`.
///
/// Each level's Hessian is taken by central differences in relative
/// coordinates `d_i (1 + v_i)` on `G_l / d_l^2`, then assembled with weights
/// `eps^{theta_l} d_l^2 / sqrt(eps^{theta_i} d_i^2 eps^{theta_j} d_j^2)`. This
/// is a diagonal congruence of the true Hessian, so the eigenvalue signs agree.
pub fn hessian_check(m: &ReducedModel, d: &[f64], eps: f64, fd_step: f64) -> Result<(bool, EigenSummary)> {
    check_heights(m, d)?;
    if !(fd_step >= MIN_FD_STEP) {
        return Err(Error::StepTooSmall(fd_step));
    }
    if fd_step >= 0.25 {
        return Err(Error::Invalid(format!("relative step {fd_step} too large")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Invalid(format!("eps = {eps} must lie in (0, 1)")));
    }
    let theta = m.theta();
    let ln_eps = eps.ln();
    let ln_d: Vec<f64> = d.iter().map(|v| v.ln()).collect();
    let ln_weight: Vec<f64> = (0..m.k).map(|i| theta[i] * ln_eps + 2.0 * ln_d[i]).collect();
    let e = m.interaction_power();
    let h = fd_step;
    let mut hess = DMatrix::<f64>::zeros(m.k, m.k);
    for l in 0..m.k {
        if l == 0 {
            let coef = m.a * m.weyl_sq * d[0] * d[0];
            let f = |v: f64| -coef * (1.0 + v).powi(4) + m.b * (1.0 + v).powi(2);
            hess[(0, 0)] += second_difference(&f, h);
            continue;
        }
        let kappa = (m.c.ln() + e * (ln_d[l] - ln_d[l - 1]) - 2.0 * ln_d[l]).exp();
        let f = |vp: f64, v: f64| -kappa * ((1.0 + v) / (1.0 + vp)).powf(e) + m.b * (1.0 + v).powi(2);
        let hpp = second_difference(&|x| f(x, 0.0), h);
        let hdd = second_difference(&|x| f(0.0, x), h);
        let hpd = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        let w = |i: usize, j: usize| (ln_weight[l] - 0.5 * (ln_weight[i] + ln_weight[j])).exp();
        hess[(l, l)] += hdd;
        hess[(l - 1, l - 1)] += w(l - 1, l - 1) * hpp;
        hess[(l - 1, l)] += w(l - 1, l) * hpd;
        hess[(l, l - 1)] += w(l - 1, l) * hpd;
    }
    let eig = SymmetricEigen::new(hess.clone());
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let summary = EigenSummary {
        min: eigenvalues[0],
        max: eigenvalues[m.k - 1],
        scaled_hessian: (0..m.k).map(|i| (0..m.k).map(|j| hess[(i, j)]).collect()).collect(),
        eigenvalues,
    };
    Ok((summary.max < 0.0, summary))
}

fn second_difference(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
}
