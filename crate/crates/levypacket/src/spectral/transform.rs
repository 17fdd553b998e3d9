//! Centered FFT transforms between the two Fourier conventions, plus FFT
//! convolution.
//!
//! With x_j = (j - N/2) dx, u_k = (k - N/2) du and dx du = 2pi/N, the
//! centered exponential factorizes as
//! e^{-i u_k x_j} = (-1)^{j+k} e^{-2pi i jk/N} (N a multiple of 4), so every
//! transform below is a plain FFT with sign flips on odd input and output
//! indices.  Quadrature over the frequency grid treats the missing +u_max
//! endpoint by conjugate symmetry (characteristic functions) or periodically
//! (wave functions, keeping the map exactly unitary in the discrete norm).

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;

use super::grid::GridPair;
use crate::error::{Error, Result};

/// Absolute tolerance for the conjugate-symmetry precheck in [`chf_to_pdf`].
pub const SYMMETRY_TOL: f64 = 1e-8;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        let fft = if inverse {
            planner.plan_fft_inverse(buf.len())
        } else {
            planner.plan_fft_forward(buf.len())
        };
        fft.process(buf);
    });
}

/// (-1)^index sign flip on input, FFT, sign flip on output: implements
/// sum_m (-1)^m v_m e^{-+ 2pi i pm/N} with centered phases.
fn signed_dft(values: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(m, &v)| if m % 2 == 1 { -v } else { v })
        .collect();
    fft_in_place(&mut buf, inverse);
    for (p, v) in buf.iter_mut().enumerate() {
        if p % 2 == 1 {
            *v = -*v;
        }
    }
    buf
}

fn check_len(grid: &GridPair, len: usize) -> Result<()> {
    if len != grid.n() {
        return Err(Error::Domain(format!(
            "field length {len} does not match grid size {}",
            grid.n()
        )));
    }
    Ok(())
}

/// Invert a characteristic function sampled on the frequency grid into a
/// density on the position grid:
/// rho(x_j) = (du/2pi) sum_k phi(u_k) e^{-i u_k x_j} (trapezoid in u).
///
/// Prechecks: phi must be conjugate-symmetric (phi(-u) = conj phi(u), within
/// [`SYMMETRY_TOL`]) and must have decayed below `aliasing_tol` at the grid
/// frequency boundary.  Returns the real density values together with the
/// largest |imaginary part| seen before discarding it.
pub fn chf_to_pdf(
    grid: &GridPair,
    phi: &[Complex64],
    aliasing_tol: f64,
) -> Result<(Vec<f64>, f64)> {
    check_len(grid, phi.len())?;
    let n = grid.n();
    let edge = phi[0].norm().max(phi[n - 1].norm());
    if edge > aliasing_tol {
        return Err(Error::Aliasing(format!(
            "characteristic function is {edge:.3e} at the frequency boundary u = +-{:.3}, \
             above the tolerance {aliasing_tol:.1e}; enlarge the frequency range (more points \
             or smaller position half-width)",
            grid.u_max()
        )));
    }
    for k in 1..=n / 2 {
        let mirror = phi[n - k].conj();
        if (phi[k] - mirror).norm() > SYMMETRY_TOL {
            return Err(Error::NonSymmetric(format!(
                "phi(u) at u = {:.6} and -u differ from conjugates by {:.3e}",
                grid.u(k),
                (phi[k] - mirror).norm()
            )));
        }
    }
    // trapezoid endpoint: the missing +u_max sample equals conj(phi(-u_max))
    // and lands on the same DFT bin, so averaging realizes both half-weights
    let mut tweaked: Vec<Complex64> = phi.to_vec();
    tweaked[0] = Complex64::new(phi[0].re, 0.0);
    let out = signed_dft(&tweaked, false);
    let scale = grid.du() / (2.0 * PI);
    let mut max_imag = 0.0_f64;
    let values = out
        .iter()
        .map(|v| {
            max_imag = max_imag.max((v.im * scale).abs());
            v.re * scale
        })
        .collect();
    Ok((values, max_imag))
}

/// Forward transform of a density into its characteristic function:
/// phi(u_k) = dx sum_j rho(x_j) e^{+i u_k x_j}.
pub fn pdf_to_chf(grid: &GridPair, rho: &[f64]) -> Result<Vec<Complex64>> {
    check_len(grid, rho.len())?;
    let complex: Vec<Complex64> = rho.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    let mut out = signed_dft(&complex, true);
    let dx = grid.dx();
    for v in out.iter_mut() {
        *v *= dx;
    }
    Ok(out)
}

/// Inverse wave-function transform:
/// psi(x_j) = (2pi)^{-1/2} du sum_k psihat(u_k) e^{+i u_k x_j}.
///
/// The rectangle sum keeps the discrete L2 norms of psi and psihat exactly
/// equal (Parseval), so the map is unitary; `aliasing_tol` bounds the
/// admissible |psihat| at the frequency boundary (relative to its maximum).
pub fn wfhat_to_wf(
    grid: &GridPair,
    psihat: &[Complex64],
    aliasing_tol: f64,
) -> Result<Vec<Complex64>> {
    check_len(grid, psihat.len())?;
    let n = grid.n();
    let peak = psihat.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let edge = psihat[0].norm().max(psihat[n - 1].norm());
    if edge > aliasing_tol * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::Aliasing(format!(
            "momentum amplitude is {:.3e} of its peak at the frequency boundary, above {:.1e}",
            edge / peak,
            aliasing_tol
        )));
    }
    let mut out = signed_dft(psihat, true);
    let scale = grid.du() / (2.0 * PI).sqrt();
    for v in out.iter_mut() {
        *v *= scale;
    }
    Ok(out)
}

/// Forward wave-function transform:
/// psihat(u_k) = (2pi)^{-1/2} dx sum_j psi(x_j) e^{-i u_k x_j}.
pub fn wf_to_wfhat(grid: &GridPair, psi: &[Complex64], aliasing_tol: f64) -> Result<Vec<Complex64>> {
    check_len(grid, psi.len())?;
    let n = grid.n();
    let peak = psi.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let edge = psi[0].norm().max(psi[n - 1].norm());
    if edge > aliasing_tol * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::Aliasing(format!(
            "wave function is {:.3e} of its peak at the position boundary, above {:.1e}",
            edge / peak,
            aliasing_tol
        )));
    }
    let mut out = signed_dft(psi, false);
    let scale = grid.dx() / (2.0 * PI).sqrt();
    for v in out.iter_mut() {
        *v *= scale;
    }
    Ok(out)
}

/// Periodic FFT convolution of two fields sampled on the same uniform
/// centered grid with spacing `step`:
/// (f * g)(x_j) ~ step sum_m f(x_m) g(x_j - x_m).
///
/// Both inputs must have decayed below `edge_tol` (relative to their peaks)
/// at the grid edges, otherwise the periodic wrap-around contaminates the
/// result and an aliasing error is raised.
pub fn convolve(
    f: &[Complex64],
    g: &[Complex64],
    step: f64,
    edge_tol: f64,
) -> Result<Vec<Complex64>> {
    if f.len() != g.len() || f.len() < 8 || !f.len().is_power_of_two() {
        return Err(Error::Domain(format!(
            "convolve needs two equal power-of-two length inputs >= 8, got {} and {}",
            f.len(),
            g.len()
        )));
    }
    if !(step > 0.0) {
        return Err(Error::Domain(format!("convolve needs step > 0, got {step}")));
    }
    let n = f.len();
    for (name, field) in [("first", f), ("second", g)] {
        let peak = field.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
        let edge = field[0].norm().max(field[n - 1].norm());
        if edge > edge_tol * peak.max(f64::MIN_POSITIVE) {
            return Err(Error::Aliasing(format!(
                "{name} convolution input is {:.3e} of its peak at the grid edge, above {:.1e}; \
                 periodic wrap-around would contaminate the result",
                edge / peak,
                edge_tol
            )));
        }
    }
    // g re-indexed by displacement: g(p dx) for p = ..,-1,0,1,.. lives at
    // p mod N after an fftshift of the centered samples
    let mut a: Vec<Complex64> = f.to_vec();
    let mut b: Vec<Complex64> = (0..n).map(|p| g[(p + n / 2) % n]).collect();
    fft_in_place(&mut a, false);
    fft_in_place(&mut b, false);
    let mut c: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    fft_in_place(&mut c, true);
    let scale = step / n as f64;
    for v in c.iter_mut() {
        *v *= scale;
    }
    Ok(c)
}

/// Real-input wrapper around [`convolve`].
pub fn convolve_real(f: &[f64], g: &[f64], step: f64, edge_tol: f64) -> Result<Vec<f64>> {
    let fc: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let gc: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(convolve(&fc, &gc, step, edge_tol)?.iter().map(|v| v.re).collect())
}
