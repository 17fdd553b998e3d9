//! Special functions needed by the law catalog and the closed-form solution
//! evaluators: modified Bessel K of real and complex order, the complex
//! gamma function, the sine/cosine integrals si and ci, and reverse Bessel
//! polynomials.
//!
//! The set is deliberately small: everything here is driven by the needs of
//! variance-gamma and relativistic densities (Bessel K), Student laws
//! (si/ci inside the Levy density, gamma in normalizations) and the
//! half-integer / polynomial identities that connect them.

mod bessel;
mod gamma;
mod theta;
mod trig;

pub use bessel::{bessel_k, bessel_k0, bessel_k1, bessel_k_complex};
pub use gamma::{beta_fn, gamma_complex, gamma_real, ln_gamma};
pub use theta::reverse_bessel_theta;
pub use trig::sin_cos_integrals;
