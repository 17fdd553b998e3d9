//! Free Levy processes and Levy-Schrodinger wave packets, evolved by
//! characteristic-function (Fourier-multiplier) methods.
//!
//! The crate is organized bottom-up:
//!
//! * [`specfun`] -- Bessel K (real/complex order), complex gamma,
//!   sine/cosine integrals, reverse Bessel polynomials;
//! * [`spectral`] -- paired position/frequency grids, characteristic-function
//!   inversion, FFT convolution, adaptive quadrature and the
//!   principal-value jump generator;
//! * [`laws`] -- the catalog of symmetric infinitely divisible laws
//!   (stable, variance-gamma, Student, relativistic, compound Poisson, ...)
//!   with densities, characteristic exponents and Levy triplets;
//! * [`poisson`] -- compound Poisson mixtures with Gaussian or two-point
//!   jump components, including exact series densities;
//! * [`solutions`] -- closed-form transition laws, process densities and
//!   wave packets used as analytic references;
//! * [`evolution`] -- the scenario engine: evolve a density under
//!   phi(u, t) = chi^t(u) chi_0(u) or a wave packet under
//!   psihat(u, t) = e^{i t eta(u)} psihat_0(u), plus residual diagnostics;
//! * [`analysis`] -- norms, variances, mode finding, bimodality onset and
//!   the half-line Beta decomposition identities.
//!
//! Two Fourier conventions coexist and are never mixed: characteristic
//! functions use chi(u) = E[e^{iux}] with density inversion
//! rho(x) = (1/2pi) int chi(u) e^{-iux} du, while wave functions use the
//! symmetric pair psihat(u) = (2pi)^{-1/2} int psi(x) e^{-iux} dx.

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod laws;
pub mod poisson;
pub mod solutions;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
