//! Modified Bessel function of the second kind, K, for real and complex
//! order and argument.
//!
//! One uniform method backs everything: the integral representation
//!
//! ```text
//! K_mu(z) = \int_0^inf exp(-z cosh t) cosh(mu t) dt,     Re z > 0,
//! ```
//!
//! evaluated by the trapezoidal rule with step halving.  The integrand (as an
//! even function of t) decays double-exponentially, so the trapezoidal rule
//! converges spectrally; complex order and argument only add oscillation,
//! which the initial step size is chosen to resolve.  On top of the kernel:
//!
//! * half-integer orders n + 1/2 use the closed form
//!   sqrt(pi/2z) e^-z theta_n(z)/z^n (reverse Bessel polynomials),
//! * small integer orders (<= 5) use upward recurrence from K_0, K_1,
//!   which is stable because K grows with the order.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::theta::reverse_bessel_theta;
use crate::error::{Error, Result};

/// Truncation point: the integrand at T is below exp(-TAIL_LOG) relative to
/// its scale at t = 0, i.e. ~1e-20 -- far below every tolerance used here.
const TAIL_LOG: f64 = 46.0;
const REL_TOL: f64 = 1e-12;
const MAX_HALVINGS: usize = 22;

/// Upper truncation T for the integral: solve
/// re_z (cosh T - 1) - |re_mu| T >= TAIL_LOG by fixed-point iteration.
fn truncation_point(re_mu: f64, re_z: f64) -> f64 {
    let mut t = 3.0_f64;
    for _ in 0..40 {
        let next = ((TAIL_LOG + re_mu.abs() * t) / re_z + 1.0).acosh();
        if (next - t).abs() < 1e-3 {
            return next.max(1.0);
        }
        t = next;
    }
    t.max(1.0)
}

/// Trapezoid sum with step h over [0, T] of exp(-z cosh t) cosh(mu t),
/// written as (exp(-z cosh t + mu t) + exp(-z cosh t - mu t)) / 2 so large
/// |Re mu| t never overflows an intermediate cosh.
fn integrand(mu: Complex64, z: Complex64, t: f64) -> Complex64 {
    let c = -z * t.cosh();
    0.5 * ((c + mu * t).exp() + (c - mu * t).exp())
}

fn k_integral(mu: Complex64, z: Complex64) -> Result<Complex64> {
    let t_max = truncation_point(mu.re, z.re);
    // Initial step: resolve the fastest oscillation Im(z) sinh t + Im(mu)
    // with plenty of points per period before trusting step halving.
    let freq = mu.im.abs() + z.im.abs() * t_max.sinh();
    let mut h = (0.25f64).min(2.0 * PI / (16.0 * freq.max(1.0)));
    // First trapezoid pass (endpoints: t=0 has weight 1/2, t=T is ~0).
    let mut n = (t_max / h).ceil() as usize;
    h = t_max / n as f64;
    let mut sum = 0.5 * integrand(mu, z, 0.0);
    let mut scale = sum.norm();
    for j in 1..=n {
        let v = integrand(mu, z, j as f64 * h);
        scale = scale.max(v.norm());
        sum += v;
    }
    let mut value = sum * h;
    // Cancellation floor: when the oscillatory integrand nearly cancels, a
    // relative target below machine precision times the integrand scale is
    // unreachable; settle for that floor instead.
    let floor = 1e-15 * scale * t_max;
    let mut stable = 0;
    for _ in 0..MAX_HALVINGS {
        // refine: previous nodes are reused, only midpoints are new
        let mut mid = Complex64::new(0.0, 0.0);
        for j in 0..n {
            mid += integrand(mu, z, (j as f64 + 0.5) * h);
        }
        let refined = 0.5 * value + 0.5 * h * mid;
        let err = (refined - value).norm();
        value = refined;
        n *= 2;
        h *= 0.5;
        if err <= (REL_TOL * value.norm()).max(floor) {
            stable += 1;
            if stable >= 2 {
                return Ok(value);
            }
        } else {
            stable = 0;
        }
    }
    Err(Error::Convergence(format!(
        "bessel K integral did not settle for mu = {mu}, z = {z}"
    )))
}

fn k_integral_real(mu: f64, x: f64) -> Result<f64> {
    let t_max = truncation_point(mu, x);
    let f = |t: f64| {
        let c = -x * t.cosh();
        0.5 * ((c + mu * t).exp() + (c - mu * t).exp())
    };
    let mut h = 0.25_f64;
    let mut n = (t_max / h).ceil() as usize;
    h = t_max / n as f64;
    let mut sum = 0.5 * f(0.0);
    for j in 1..=n {
        sum += f(j as f64 * h);
    }
    let mut value = sum * h;
    let mut stable = 0;
    for _ in 0..MAX_HALVINGS {
        let mut mid = 0.0;
        for j in 0..n {
            mid += f((j as f64 + 0.5) * h);
        }
        let refined = 0.5 * value + 0.5 * h * mid;
        let err = (refined - value).abs();
        value = refined;
        n *= 2;
        h *= 0.5;
        if err <= REL_TOL * value.abs().max(f64::MIN_POSITIVE) {
            stable += 1;
            if stable >= 2 {
                return Ok(value);
            }
        } else {
            stable = 0;
        }
    }
    Err(Error::Convergence(format!(
        "bessel K integral did not settle for mu = {mu}, x = {x}"
    )))
}

/// K_{n+1/2}(x) = sqrt(pi/2x) e^-x theta_n(x)/x^n for real x > 0.
fn k_half_integer(n: usize, x: f64) -> f64 {
    (PI / (2.0 * x)).sqrt() * (-x).exp() * reverse_bessel_theta(n, x) / x.powi(n as i32)
}

/// K_0(x), x > 0.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k0 needs x > 0, got {x}")));
    }
    k_integral_real(0.0, x)
}

/// K_1(x), x > 0.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k1 needs x > 0, got {x}")));
    }
    k_integral_real(1.0, x)
}

/// K_order(x) for real order and x > 0.  K is even in the order, so the sign
/// of `order` is irrelevant.  Half-integer orders take the polynomial closed
/// form, integer orders up to 5 upward recurrence, everything else the
/// integral kernel.
pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs finite x > 0, got {x}")));
    }
    let order = order.abs();
    let doubled = 2.0 * order;
    if (doubled - doubled.round()).abs() < 1e-12 {
        let m = doubled.round() as i64;
        if m % 2 == 1 {
            return Ok(k_half_integer((m / 2) as usize, x));
        }
        let n = m / 2;
        if n <= 5 {
            // upward recurrence K_{v+1} = K_{v-1} + (2v/x) K_v from K_0, K_1
            let mut km1 = k_integral_real(0.0, x)?;
            if n == 0 {
                return Ok(km1);
            }
            let mut k = k_integral_real(1.0, x)?;
            for v in 1..n {
                let kp1 = km1 + (2.0 * v as f64 / x) * k;
                km1 = k;
                k = kp1;
            }
            return Ok(k);
        }
    }
    k_integral_real(order, x)
}

/// K_mu(z) for complex order mu and complex argument z with Re z > 0.
pub fn bessel_k_complex(mu: Complex64, z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!(
            "bessel_k_complex needs Re z > 0, got z = {z}"
        )));
    }
    k_integral(mu, z)
}
