//! Reverse Bessel polynomials.
//!
//! theta_0 = 1, theta_1(x) = x + 1 and
//! theta_n(x) = (2n - 1) theta_{n-1}(x) + x^2 theta_{n-2}(x).
//!
//! They tie together three closed-form families used throughout the crate:
//! half-integer Bessel K_{n+1/2}(x) = sqrt(pi/2x) e^-x theta_n(x)/x^n,
//! variance-gamma densities with integer shape (n + 1), and Student
//! characteristic functions of odd integer index 2n + 1.

/// Evaluate theta_n(x).  All coefficients are positive, so the recurrence is
/// stable for every x >= 0 (no cancellation).
pub fn reverse_bessel_theta(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x + 1.0,
        _ => {
            let (mut prev, mut cur) = (1.0, x + 1.0);
            let x2 = x * x;
            for k in 2..=n {
                let next = (2 * k - 1) as f64 * cur + x2 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}
