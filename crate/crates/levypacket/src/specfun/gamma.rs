//! Gamma function for real and complex argument (Lanczos approximation).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma(z) for complex z, with the reflection formula for Re z < 1/2.
///
/// Accuracy is ~1e-13 relative for |z| <= 20 away from poles; poles at the
/// nonpositive integers return [`Error::Pole`].
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole(format!("gamma pole at z = {}", z.re)));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        let one = Complex64::new(1.0, 0.0);
        Complex64::new(PI, 0.0) / ((z * PI).sin() * gamma_unchecked(one - z))
    } else {
        let zm1 = z - 1.0;
        let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
        for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            acc += c / (zm1 + i as f64);
        }
        let t = zm1 + (LANCZOS_G + 0.5);
        (2.0 * PI).sqrt() * t.powc(zm1 + 0.5) * (-t).exp() * acc
    }
}

/// Gamma(x) for real x (poles rejected).
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma_complex(Complex64::new(x, 0.0))?.re)
}

/// ln Gamma(x) for real x > 0, usable far beyond the overflow range of
/// [`gamma_real`] (factorials in Poisson series, binomial weights).
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    let zm1 = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (zm1 + i as f64);
    }
    let t = zm1 + (LANCZOS_G + 0.5);
    Ok(0.5 * (2.0 * PI).ln() + (zm1 + 0.5) * t.ln() - t + acc.ln())
}

/// Euler beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("beta needs a, b > 0, got ({a}, {b})")));
    }
    Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_and_half_integer_values() {
        // Gamma(5) = 24, Gamma(1/2) = sqrt(pi)
        assert!((gamma_real(5.0).unwrap() - 24.0).abs() < 1e-12);
        assert!((gamma_real(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn modulus_identity_on_imaginary_shift() {
        // |Gamma(1 + iy)|^2 = pi y / sinh(pi y)
        for &y in &[0.25, 0.5, 1.0, 2.0, 5.0] {
            let g = gamma_complex(Complex64::new(1.0, y)).unwrap();
            let expect = PI * y / (PI * y).sinh();
            assert!(
                (g.norm_sqr() - expect).abs() <= 1e-12 * expect,
                "y = {y}: got {}, want {}",
                g.norm_sqr(),
                expect
            );
        }
    }

    #[test]
    fn recurrence_complex() {
        // Gamma(z + 1) = z Gamma(z) at a few complex points, both half-planes
        for &(re, im) in &[(0.3, 0.7), (2.5, -1.5), (-1.3, 0.4), (4.0, 3.0)] {
            let z = Complex64::new(re, im);
            let lhs = gamma_complex(z + 1.0).unwrap();
            let rhs = z * gamma_complex(z).unwrap();
            assert!((lhs - rhs).norm() <= 1e-11 * lhs.norm().max(1e-30), "z = {z}");
        }
    }

    #[test]
    fn poles_rejected() {
        assert!(gamma_complex(Complex64::new(0.0, 0.0)).is_err());
        assert!(gamma_complex(Complex64::new(-3.0, 0.0)).is_err());
        assert!(gamma_complex(Complex64::new(-3.0, 1e-3)).is_ok());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.5, 1.0, 4.2, 10.0, 20.0] {
            let want = gamma_real(x).unwrap().ln();
            assert!((ln_gamma(x).unwrap() - want).abs() < 1e-11 * want.abs().max(1.0));
        }
        // factorial range far beyond f64 gamma overflow: ln 199! = sum ln k
        let direct: f64 = (1..200).map(|k| (k as f64).ln()).sum();
        assert!((ln_gamma(200.0).unwrap() - direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn beta_closed_values() {
        // B(1/2, 1/2) = pi, B(1/2, 3/2) = pi/2
        assert!((beta_fn(0.5, 0.5).unwrap() - PI).abs() < 1e-12);
        assert!((beta_fn(0.5, 1.5).unwrap() - PI / 2.0).abs() < 1e-12);
    }
}
