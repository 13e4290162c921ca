//! Adaptive Gauss–Kronrod quadrature for radial functions on shells of R^N.
//!
//! Every integral here is of a function of `|x|` only, reduced to
//! `sigma_{N-1} * int r^{N-1} f(r) dr` with `sigma_{N-1} = 2 pi^{N/2} / Gamma(N/2)`.
//! Unbounded shells use `r = t / (1 - t)`. Panels are refined largest-error
//! first with ties broken by creation order, and the final sum runs over panels
//! in left-to-right order, so results are bit-reproducible.
//!
//! For integrands whose magnitude leaves the double range, [`integrate_ln_radial`]
//! takes the logarithm of the integrand and returns the logarithm of the result.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub const CONSTANT_REL_TOL: f64 = 1e-10;
pub const SWEEP_REL_TOL: f64 = 1e-8;

const MAX_PANELS: usize = 6000;

// 21-point Kronrod extension of the 10-point Gauss rule (nonnegative half).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_156_148_902,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ...
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// A radial profile `f(r)` with its algebraic decay power at infinity
/// (`|f(r)| <~ r^-decay_power`). Use `f64::INFINITY` for compact support.
pub struct RadialIntegrand<F> {
    pub eval: F,
    pub decay_power: f64,
}

impl<F: Fn(f64) -> f64> RadialIntegrand<F> {
    pub fn new(eval: F, decay_power: f64) -> Self {
        RadialIntegrand { eval, decay_power }
    }

    pub fn compact(eval: F) -> Self {
        RadialIntegrand { eval, decay_power: f64::INFINITY }
    }
}

/// The shell `inner <= |x| < outer`; `outer` may be `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RadialInterval {
    pub inner: f64,
    pub outer: f64,
}

impl RadialInterval {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && outer > inner) || inner.is_infinite() {
            return Err(Error::Invalid(format!("bad radial interval [{inner}, {outer})")));
        }
        Ok(RadialInterval { inner, outer })
    }

    pub fn ball(outer: f64) -> Result<Self> {
        Self::new(0.0, outer)
    }

    pub fn whole_space() -> Self {
        RadialInterval { inner: 0.0, outer: f64::INFINITY }
    }

    pub fn is_unbounded(&self) -> bool {
        self.outer.is_infinite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Natural log of the area of the unit sphere in R^dim.
pub fn ln_sphere_area(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    std::f64::consts::LN_2 + h * std::f64::consts::PI.ln() - ln_gamma(h)
}

/// Area of the unit sphere `S^{dim-1}` in R^dim.
pub fn sphere_area(dim: usize) -> f64 {
    ln_sphere_area(dim).exp()
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    id: usize,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        // Largest error first; earlier panels win ties.
        self.error.total_cmp(&o.error).then_with(|| o.id.cmp(&self.id))
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = 0.0;
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive integration of `f` over `[a, b]` starting from `initial` equal panels.
///
/// Stops when the summed error estimate is below `rel_tol * |value|`. If the
/// panel budget runs out the best estimate is returned inside
/// [`Error::ToleranceNotReached`].
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, initial: usize) -> Result<QuadratureResult> {
    adaptive_abs(f, a, b, rel_tol, 0.0, initial)
}

/// [`adaptive`] that also stops once the error estimate is below `abs_tol`.
pub fn adaptive_abs<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    initial: usize,
) -> Result<QuadratureResult> {
    let initial = initial.max(1);
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Panel> = Vec::new();
    let mut next_id = 0;
    let w = (b - a) / initial as f64;
    for i in 0..initial {
        let pa = a + w * i as f64;
        let pb = if i + 1 == initial { b } else { a + w * (i + 1) as f64 };
        let (value, error) = gk21(&f, pa, pb);
        heap.push(Panel { a: pa, b: pb, value, error, id: next_id });
        next_id += 1;
    }
    let mut evaluations = 21 * initial;
    let mut value: f64 = heap.iter().map(|p| p.value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Invalid(format!("non-finite integrand on [{a:e}, {b:e}]")));
        }
        let converged = error <= rel_tol * value.abs() || error <= abs_tol || error < 1e-300;
        if converged || heap.is_empty() || heap.len() + done.len() >= MAX_PANELS {
            let mut all: Vec<Panel> = heap.into_vec();
            all.append(&mut done);
            all.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value: f64 = all.iter().map(|p| p.value).sum();
            let error: f64 = all.iter().map(|p| p.error).sum();
            let r = QuadratureResult { value, abs_error_estimate: error, evaluations };
            return if converged {
                Ok(r)
            } else {
                Err(Error::ToleranceNotReached { value, abs_error: error, evaluations })
            };
        }
        let p = heap.pop().expect("checked non-empty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // Cannot be split further in floating point.
            done.push(p);
            continue;
        }
        value -= p.value;
        error -= p.error;
        for (pa, pb) in [(p.a, m), (m, p.b)] {
            let (v, e) = gk21(&f, pa, pb);
            value += v;
            error += e;
            heap.push(Panel { a: pa, b: pb, value: v, error: e, id: next_id });
            next_id += 1;
        }
        error = error.max(0.0);
        evaluations += 42;
    }
}

/// `int_{shell} f(|x|) dx` in R^dim.
pub fn integrate_radial<F: Fn(f64) -> f64>(
    f: &RadialIntegrand<F>,
    dom: RadialInterval,
    dim: usize,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate_radial_abs(f, dom, dim, rel_tol, 0.0)
}

/// [`integrate_radial`] that also accepts an absolute error below `abs_tol`.
pub fn integrate_radial_abs<F: Fn(f64) -> f64>(
    f: &RadialIntegrand<F>,
    dom: RadialInterval,
    dim: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    if dim < 2 {
        return Err(Error::DimensionTooLow { dim, min: 2 });
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::Invalid(format!("rel_tol {rel_tol} outside (0, 1)")));
    }
    let sigma = sphere_area(dim);
    let n1 = (dim - 1) as i32;
    let mut r = if dom.is_unbounded() {
        // Integrability of r^{N-1} r^{-p} at infinity.
        if -f.decay_power + (dim as f64 - 1.0) >= -1.0 {
            return Err(Error::NonIntegrable { decay: f.decay_power, dim });
        }
        let t0 = dom.inner / (1.0 + dom.inner);
        adaptive_abs(
            |t: f64| {
                let s = 1.0 - t;
                let r = t / s;
                sigma * r.powi(n1) * (f.eval)(r) / (s * s)
            },
            t0,
            1.0,
            rel_tol,
            abs_tol,
            8,
        )
    } else {
        adaptive_abs(|r: f64| sigma * r.powi(n1) * (f.eval)(r), dom.inner, dom.outer, rel_tol, abs_tol, 4)
    }?;
    r.evaluations = r.evaluations.max(1);
    Ok(r)
}

/// Shell in logarithmic radius: `ln_inner = -inf` denotes a ball and
/// `ln_outer = +inf` the exterior to infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LnShell {
    pub ln_inner: f64,
    pub ln_outer: f64,
}

impl LnShell {
    pub fn from_interval(iv: RadialInterval) -> Self {
        LnShell { ln_inner: iv.inner.ln(), ln_outer: iv.outer.ln() }
    }
}

/// Logarithm of a positive integral, with its relative error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LnQuadrature {
    pub ln_value: f64,
    pub rel_error: f64,
    pub evaluations: usize,
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Integrate `exp(g(y))` over `(lo, hi)` after removing the sampled maximum of `g`.
fn ln_piece<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, rel_tol: f64, panels: usize) -> Result<LnQuadrature> {
    const SAMPLES: usize = 257;
    let mut peak = f64::NEG_INFINITY;
    for i in 1..SAMPLES {
        let y = lo + (hi - lo) * i as f64 / SAMPLES as f64;
        let v = g(y);
        if v.is_nan() {
            return Err(Error::Invalid(format!("NaN log-integrand at {y:e}")));
        }
        peak = peak.max(v);
    }
    if peak == f64::NEG_INFINITY {
        return Ok(LnQuadrature { ln_value: f64::NEG_INFINITY, rel_error: 0.0, evaluations: SAMPLES });
    }
    let r = adaptive(|y| (g(y) - peak).exp(), lo, hi, rel_tol, panels)?;
    Ok(LnQuadrature {
        ln_value: r.value.ln() + peak,
        rel_error: r.abs_error_estimate / r.value.abs(),
        evaluations: r.evaluations + SAMPLES,
    })
}

/// `ln int_{shell} f(|x|) dx` for positive `f` given as `ln_f(ln r)`.
///
/// `ln_scale` is the log of the smallest length scale of `f`; a ball is split
/// there into a linear core and a logarithmic outer part.
pub fn integrate_ln_radial<G: Fn(f64) -> f64>(
    ln_f: G,
    shell: LnShell,
    dim: usize,
    ln_scale: f64,
    rel_tol: f64,
) -> Result<LnQuadrature> {
    if !(shell.ln_outer > shell.ln_inner) {
        return Err(Error::Invalid("empty logarithmic shell".into()));
    }
    let ln_sigma = ln_sphere_area(dim);
    let n = dim as f64;
    let log_piece = |s0: f64, s1: f64| -> Result<LnQuadrature> {
        if s1.is_infinite() {
            ln_piece(
                |tau: f64| {
                    let u = 1.0 - tau;
                    let s = s0 + tau / u;
                    ln_sigma + n * s + ln_f(s) - 2.0 * u.ln()
                },
                0.0,
                1.0,
                rel_tol,
                8,
            )
        } else {
            let panels = ((s1 - s0).ceil() as usize).clamp(4, 512);
            ln_piece(|s: f64| ln_sigma + n * s + ln_f(s), s0, s1, rel_tol, panels)
        }
    };
    let mut parts = Vec::with_capacity(2);
    if shell.ln_inner == f64::NEG_INFINITY {
        let c = ln_scale.min(shell.ln_outer);
        parts.push(ln_piece(
            |y: f64| {
                let ly = y.ln();
                ln_sigma + n * c + (n - 1.0) * ly + ln_f(c + ly)
            },
            0.0,
            1.0,
            rel_tol,
            4,
        )?);
        if c < shell.ln_outer {
            parts.push(log_piece(c, shell.ln_outer)?);
        }
    } else {
        parts.push(log_piece(shell.ln_inner, shell.ln_outer)?);
    }
    let ln_value = parts.iter().fold(f64::NEG_INFINITY, |acc, p| ln_add(acc, p.ln_value));
    let rel_error = parts.iter().map(|p| p.rel_error * (p.ln_value - ln_value).exp()).filter(|e| e.is_finite()).sum();
    let evaluations = parts.iter().map(|p| p.evaluations).sum();
    Ok(LnQuadrature { ln_value, rel_error, evaluations })
}

/// The pointwise function whose L^q norm is requested.
pub enum ShellFunction<'a> {
    /// `g(|x|)` with the decay power of `g`.
    Radial { profile: &'a dyn Fn(f64) -> f64, decay_power: f64 },
    /// `g(|x|) * x^alpha`.
    RadialMonomial { profile: &'a dyn Fn(f64) -> f64, decay_power: f64, alpha: &'a [u32] },
}

/// `int_{S^{N-1}} prod |w_i|^{b_i} dw = 2 prod Gamma((b_i+1)/2) / Gamma((sum b + N)/2)`.
pub fn ln_sphere_abs_moment(b: &[f64], dim: usize) -> f64 {
    let padded = dim.saturating_sub(b.len()) as f64;
    let total: f64 = b.iter().sum();
    std::f64::consts::LN_2 + b.iter().map(|bi| ln_gamma((bi + 1.0) / 2.0)).sum::<f64>() + padded * ln_gamma(0.5)
        - ln_gamma((total + dim as f64) / 2.0)
}

/// `(int_{shell} |f|^q dx)^{1/q}`.
pub fn lq_norm_shell(f: &ShellFunction<'_>, dom: RadialInterval, q: f64, dim: usize, rel_tol: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::Invalid(format!("exponent q = {q} < 1")));
    }
    let (profile, decay, alpha): (&dyn Fn(f64) -> f64, f64, &[u32]) = match f {
        ShellFunction::Radial { profile, decay_power } => (*profile, *decay_power, &[]),
        ShellFunction::RadialMonomial { profile, decay_power, alpha } => (*profile, *decay_power, alpha),
    };
    if alpha.len() > dim {
        return Err(Error::Invalid("monomial has more indices than the dimension".into()));
    }
    let deg: u32 = alpha.iter().sum();
    let b: Vec<f64> = alpha.iter().map(|&a| q * a as f64).collect();
    let angular = (ln_sphere_abs_moment(&b, dim) - ln_sphere_area(dim)).exp();
    let integrand =
        RadialIntegrand::new(|r: f64| (profile(r).abs() * r.powi(deg as i32)).powf(q), q * (decay - deg as f64));
    let r = integrate_radial(&integrand, dom, dim, rel_tol)?;
    Ok((angular * r.value).max(0.0).powf(1.0 / q))
}

/// Ratio `int x^alpha g(|x|) dx / int |x|^{|alpha|} g(|x|) dx`, exact.
///
/// Zero when some exponent is odd; otherwise the sphere average of `w^alpha`,
/// `prod (alpha_i - 1)!! / (N (N+2) ... (N + |alpha| - 2))`.
pub fn angular_moment_factor(alpha: &[u32], dim: usize) -> Result<f64> {
    let deg: u32 = alpha.iter().sum();
    if deg > 4 {
        return Err(Error::UnsupportedDegree(deg));
    }
    if alpha.len() > dim {
        return Err(Error::Invalid("monomial has more indices than the dimension".into()));
    }
    if alpha.iter().any(|a| a % 2 == 1) {
        return Ok(0.0);
    }
    let num: f64 = alpha.iter().map(|&a| (1..a).step_by(2).map(f64::from).product::<f64>()).product();
    let den: f64 = (0..deg / 2).map(|j| dim as f64 + 2.0 * j as f64).product();
    Ok(num / den)
}

/// `int x^alpha g(|x|) dx` by exact symmetry reduction to one radial integral.
pub fn moment_integral<F: Fn(f64) -> f64>(
    g: &RadialIntegrand<F>,
    alpha: &[u32],
    dom: RadialInterval,
    dim: usize,
    rel_tol: f64,
) -> Result<f64> {
    let factor = angular_moment_factor(alpha, dim)?;
    if factor == 0.0 {
        return Ok(0.0);
    }
    let deg: u32 = alpha.iter().sum();
    let weighted = RadialIntegrand::new(|r: f64| r.powi(deg as i32) * (g.eval)(r), g.decay_power - deg as f64);
    Ok(factor * integrate_radial(&weighted, dom, dim, rel_tol)?.value)
}
