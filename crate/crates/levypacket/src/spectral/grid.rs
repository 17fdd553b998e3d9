//! Paired position/frequency grids.
//!
//! A `GridPair` couples the centered position grid
//! x_j = -L + j dx (j = 0..N-1, dx = 2L/N) with the centered frequency grid
//! u_k = (k - N/2) du (du = pi/L), so that dx du = 2pi/N and a length-N FFT
//! maps one onto the other exactly.  Both grids contain 0 at index N/2.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPair {
    n: usize,
    l: f64,
}

impl GridPair {
    /// `n` must be a power of two >= 8 (so it is also a multiple of 4, which
    /// the centered-transform phase conventions rely on); `l` is the
    /// position half-width.
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "grid size must be a power of two >= 8, got {n}"
            )));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Domain(format!("grid half-width must be positive, got {l}")));
        }
        Ok(Self { n, l })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Position half-width L; the grid covers [-L, L).
    pub fn half_width(&self) -> f64 {
        self.l
    }

    /// Position spacing dx = 2L/N.
    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    /// Frequency spacing du = pi/L.
    pub fn du(&self) -> f64 {
        std::f64::consts::PI / self.l
    }

    /// Frequency half-width pi/dx = (N/2) du; the grid covers [-u_max, u_max).
    pub fn u_max(&self) -> f64 {
        self.n as f64 / 2.0 * self.du()
    }

    /// x_j = -L + j dx.
    pub fn x(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.dx()
    }

    /// u_k = (k - N/2) du.
    pub fn u(&self, k: usize) -> f64 {
        (k as f64 - self.n as f64 / 2.0) * self.du()
    }

    /// Index of x = 0 and u = 0.
    pub fn center(&self) -> usize {
        self.n / 2
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn us(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.u(k)).collect()
    }
}
