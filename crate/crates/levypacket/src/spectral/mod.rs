//! Spectral infrastructure: paired position/frequency grids, centered FFT
//! transforms between densities and characteristic functions (and between
//! wave functions and their momentum representations), FFT convolution,
//! adaptive quadrature, cubic splines and the principal-value jump
//! generator.
//!
//! Two Fourier conventions are served and never mixed:
//!
//! * characteristic functions: chi(u) = int rho(x) e^{+iux} dx,
//!   rho(x) = (1/2pi) int chi(u) e^{-iux} du;
//! * wave functions: psihat(u) = (2pi)^{-1/2} int psi(x) e^{-iux} dx,
//!   psi(x) = (2pi)^{-1/2} int psihat(u) e^{+iux} du.

mod grid;
pub(crate) mod pv;
mod quad;
mod spline;
mod transform;

pub use grid::GridPair;
pub use pv::{pv_generator_apply, ClosurePair, SmoothFn};
pub use quad::{adaptive_integrate, adaptive_integrate_complex, QuadResult};
pub use spline::ComplexSpline;
pub use transform::{
    chf_to_pdf, convolve, convolve_real, pdf_to_chf, wf_to_wfhat, wfhat_to_wf,
};
