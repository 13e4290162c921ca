//! Aubin–Talenti bubbles `U(x) = alpha_N (1 + |x|^2)^{-(N-2)/2}`, their
//! rescalings, and the kernel of the linearised critical operator.
//!
//! Radial derivatives are written in the variable `s = |x|^2`, where every
//! derivative of `(1+s)^{-a}` is again a power of `1+s`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use twofloat::TwoFloat;

/// The standard bubble in dimension `dim` (`mu = 1`, centred at the origin).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BubbleProfile {
    pub dim: usize,
    /// `(N-2)/2`.
    pub a: f64,
    /// `(N(N-2))^{(N-2)/4}`.
    pub alpha: f64,
    /// Critical exponent `(N+2)/(N-2)`.
    pub p: f64,
}

impl BubbleProfile {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::DimensionTooLow { dim, min: 3 });
        }
        let n = dim as f64;
        Ok(BubbleProfile {
            dim,
            a: (n - 2.0) / 2.0,
            alpha: (n * (n - 2.0)).powf((n - 2.0) / 4.0),
            p: (n + 2.0) / (n - 2.0),
        })
    }

    pub fn value(&self, r: f64) -> f64 {
        self.alpha * (1.0 + r * r).powf(-self.a)
    }

    /// `U'(r)`.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        r * self.grad_over_r(r)
    }

    /// `U'(r)/r`, finite at the origin.
    pub fn grad_over_r(&self, r: f64) -> f64 {
        -2.0 * self.a * self.alpha * (1.0 + r * r).powf(-self.a - 1.0)
    }

    /// `(U'' - U'/r) / r^2`, finite at the origin.
    pub fn hessian_radial(&self, r: f64) -> f64 {
        4.0 * self.a * (self.a + 1.0) * self.alpha * (1.0 + r * r).powf(-self.a - 2.0)
    }

    /// `Delta U` from the closed form.
    ///
    /// `2N U_s + 4 s U_ss` regrouped in powers of `b = 1 + s`, so the
    /// far-field cancellation happens in the coefficients.
    pub fn laplacian(&self, r: f64) -> f64 {
        let n = self.dim as f64;
        let b = 1.0 + r * r;
        let lead = 4.0 * (self.a + 1.0) - 2.0 * n;
        self.a * self.alpha * b.powf(-self.a - 2.0) * (lead * b - 4.0 * (self.a + 1.0))
    }

    /// `psi^0(r) = r U'(r) + a U(r)`.
    pub fn kernel_radial(&self, r: f64) -> f64 {
        let s = r * r;
        self.a * self.alpha * (1.0 + s).powf(-self.a - 1.0) * (1.0 - s)
    }

    /// `f'(U) = p U^{p-1} = p N (N-2) (1+r^2)^{-2}`.
    pub fn linearised_potential(&self, r: f64) -> f64 {
        let n = self.dim as f64;
        self.p * n * (n - 2.0) * (1.0 + r * r).powi(-2)
    }
}

/// `U_{mu,y}(x) = mu^{-(N-2)/2} U((x - y)/mu)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bubble {
    pub dim: usize,
    pub mu: f64,
    pub center: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Value,
    Gradient,
    Hessian,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BubbleOutput {
    Value(f64),
    Gradient(DVector<f64>),
    Hessian(DMatrix<f64>),
}

impl Bubble {
    pub fn standard(dim: usize) -> Self {
        Bubble { dim, mu: 1.0, center: vec![0.0; dim] }
    }

    fn scaled_point(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "point dimension mismatch");
        x.iter().zip(&self.center).map(|(xi, yi)| (xi - yi) / self.mu).collect()
    }

    /// `Delta U_{mu,y}(x)` and `U_{mu,y}(x)^p`, for checking the critical equation.
    pub fn critical_terms(&self, x: &[f64]) -> Result<(f64, f64)> {
        let prof = BubbleProfile::new(self.dim)?;
        let z = self.scaled_point(x);
        let r = norm(&z);
        let lap = self.mu.powf(-prof.a - 2.0) * prof.laplacian(r);
        let v = self.mu.powf(-prof.a) * prof.value(r);
        Ok((lap, v.powf(prof.p)))
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Closed-form value, gradient or Hessian of a rescaled bubble.
pub fn bubble_eval(b: &Bubble, x: &[f64], order: Order) -> Result<BubbleOutput> {
    let prof = BubbleProfile::new(b.dim)?;
    let z = b.scaled_point(x);
    let r = norm(&z);
    Ok(match order {
        Order::Value => BubbleOutput::Value(b.mu.powf(-prof.a) * prof.value(r)),
        Order::Gradient => {
            let c = b.mu.powf(-prof.a - 1.0) * prof.grad_over_r(r);
            BubbleOutput::Gradient(DVector::from_iterator(b.dim, z.iter().map(|zi| c * zi)))
        }
        Order::Hessian => {
            let scale = b.mu.powf(-prof.a - 2.0);
            let u1 = prof.grad_over_r(r);
            let u2 = prof.hessian_radial(r);
            BubbleOutput::Hessian(DMatrix::from_fn(b.dim, b.dim, |i, j| {
                let d = if i == j { u1 } else { 0.0 };
                scale * (d + z[i] * z[j] * u2)
            }))
        }
    })
}

/// `psi^0 = x . grad U + (N-2)/2 U` for `index = 0`, `psi^i = d_i U` for `1 <= index <= N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelElement {
    pub dim: usize,
    pub index: usize,
}

impl KernelElement {
    pub fn new(dim: usize, index: usize) -> Result<Self> {
        if index > dim {
            return Err(Error::IndexOutOfRange { what: "kernel", index, lo: 0, hi: dim });
        }
        Ok(KernelElement { dim, index })
    }
}

pub fn kernel_eval(k: KernelElement, x: &[f64]) -> Result<f64> {
    let prof = BubbleProfile::new(k.dim)?;
    assert_eq!(x.len(), k.dim, "point dimension mismatch");
    let r = norm(x);
    Ok(if k.index == 0 { prof.kernel_radial(r) } else { x[k.index - 1] * prof.grad_over_r(r) })
}

// Double-double evaluation keeps the cancellation in the residual below 1e-25
// of the individual terms, which reach ~1e7 at N = 11.
struct DdProfile {
    n: TwoFloat,
    a: TwoFloat,
    p: TwoFloat,
    alpha: TwoFloat,
    twice_a: i32,
}

impl DdProfile {
    fn new(dim: usize) -> Self {
        let n = TwoFloat::from(dim as f64);
        let nn2 = TwoFloat::from((dim * (dim - 2)) as f64);
        // alpha = sqrt(N(N-2))^{(N-2)/2} = (N(N-2))^{1/4 * (N-2)}
        let alpha = half_power(nn2.sqrt(), (dim - 2) as i32);
        DdProfile {
            n,
            a: TwoFloat::from((dim as f64 - 2.0) / 2.0),
            p: TwoFloat::from((dim + 2) as f64) * dd_recip(TwoFloat::from((dim - 2) as f64)),
            alpha,
            twice_a: (dim - 2) as i32,
        }
    }

    /// `d^k/ds^k U` at `s` for k = 0..=3.
    fn derivatives(&self, s: TwoFloat) -> [TwoFloat; 4] {
        let b = TwoFloat::from(1.0) + s;
        let mut out = [TwoFloat::from(0.0); 4];
        let mut coef = self.alpha;
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = coef * half_power(b, -(self.twice_a + 2 * k as i32));
            coef = -coef * (self.a + TwoFloat::from(k as f64));
        }
        out
    }

    fn potential(&self, s: TwoFloat) -> TwoFloat {
        let b = TwoFloat::from(1.0) + s;
        self.p * self.n * (self.n - TwoFloat::from(2.0)) * dd_recip(b * b)
    }
}

/// `1/x` in double-double; the library division keeps only about 17 digits.
pub(crate) fn dd_recip(x: TwoFloat) -> TwoFloat {
    let one = TwoFloat::from(1.0);
    let mut y = TwoFloat::from(1.0 / x.hi());
    for _ in 0..2 {
        y = y + y * (one - x * y);
    }
    y
}

/// `x^{m/2}` in double-double.
pub(crate) fn half_power(x: TwoFloat, m: i32) -> TwoFloat {
    let k = m.unsigned_abs() as i32;
    let p = if k % 2 == 0 { x.powi(k / 2) } else { x.sqrt().powi(k) };
    if m < 0 {
        dd_recip(p)
    } else {
        p
    }
}

/// `-Delta psi - p U^{p-1} psi` from closed-form derivatives.
pub fn linearized_residual(k: KernelElement, x: &[f64]) -> Result<f64> {
    if k.dim < 3 {
        return Err(Error::DimensionTooLow { dim: k.dim, min: 3 });
    }
    assert_eq!(x.len(), k.dim, "point dimension mismatch");
    let d = DdProfile::new(k.dim);
    let s = x.iter().fold(TwoFloat::from(0.0), |acc, &v| {
        let t = TwoFloat::from(v);
        acc + t * t
    });
    let [u, us, uss, usss] = d.derivatives(s);
    let two = TwoFloat::from(2.0);
    let four = TwoFloat::from(4.0);
    let v = d.potential(s);
    let res = if k.index == 0 {
        // psi^0 = 2 s U_s + a U as a function of s; Delta h = 2N h_s + 4 s h_ss.
        let h = two * s * us + d.a * u;
        let hs = (two + d.a) * us + two * s * uss;
        let hss = (four + d.a) * uss + two * s * usss;
        -(two * d.n * hs + four * s * hss) - v * h
    } else {
        // psi^i = x_i phi(s), phi = 2 U_s; Delta(x_i phi) = x_i (2(N+2) phi_s + 4 s phi_ss).
        let xi = TwoFloat::from(x[k.index - 1]);
        let phi = two * us;
        let phis = two * uss;
        let phiss = two * usss;
        xi * (-(two * (d.n + two) * phis + four * s * phiss) - v * phi)
    };
    Ok(f64::from(res))
}

/// Bookkeeping bound `c_env (1 + |x|^2)^{-(N-4)/2}` for the correction term.
pub fn v_decay_envelope(x: &[f64], dim: usize, c_env: f64) -> Result<f64> {
    if dim < 7 {
        return Err(Error::DimensionTooLow { dim, min: 7 });
    }
    let s: f64 = x.iter().map(|v| v * v).sum();
    Ok(c_env * (1.0 + s).powf(-(dim as f64 - 4.0) / 2.0))
}
