//! Sine and cosine integrals in the tail-normalized form used by the
//! Student Levy density:
//!
//! ```text
//! si(x) = -\int_x^inf sin(y)/y dy = Si(x) - pi/2
//! ci(x) = -\int_x^inf cos(y)/y dy
//! ```
//!
//! Power series below x = 4, a complex continued fraction (modified Lentz on
//! the exponential integral E_1(-ix), for which ci + i si = -E_1(-ix)) above.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SPLIT: f64 = 4.0;

/// Returns (si(x), ci(x)) for x > 0.
pub fn sin_cos_integrals(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "sin_cos_integrals needs finite x > 0, got {x}"
        )));
    }
    if x < SPLIT {
        Ok(by_series(x))
    } else {
        by_continued_fraction(x)
    }
}

fn by_series(x: f64) -> (f64, f64) {
    let x2 = x * x;
    // Si(x) = sum (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    let mut si = x;
    let mut p = x; // x^(2k+1)/(2k+1)!
    // Ci(x) = gamma + ln x + sum_{k>=1} (-1)^k x^(2k) / (2k (2k)!)
    let mut ci = EULER_GAMMA + x.ln();
    let mut q = 1.0; // x^(2k)/(2k)!
    let mut sign = 1.0;
    for k in 1..60 {
        let k = k as f64;
        q *= x2 / ((2.0 * k - 1.0) * (2.0 * k));
        p *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
        sign = -sign;
        let dci = sign * q / (2.0 * k);
        let dsi = sign * p / (2.0 * k + 1.0);
        ci += dci;
        si += dsi;
        if dci.abs() + dsi.abs() < 1e-18 {
            break;
        }
    }
    (si - FRAC_PI_2, ci)
}

fn by_continued_fraction(x: f64) -> Result<(f64, f64)> {
    // E_1(w), w = -ix, by the continued fraction
    // E_1(w) = e^-w / (w + 1 - 1/(w + 3 - 4/(w + 5 - 9/(...))))
    let w = Complex64::new(0.0, -x);
    let tiny = 1e-300;
    let mut b = w + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut converged = false;
    for k in 1..400 {
        let a = -((k * k) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "sine/cosine integral continued fraction stalled at x = {x}"
        )));
    }
    let e1 = (-w).exp() * h; // e^{ix} * CF
    Ok((-e1.im, -e1.re))
}
