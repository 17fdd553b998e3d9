//! Natural cubic spline on a uniform grid, complex-valued.
//!
//! Used to turn sampled field slices back into twice-differentiable
//! functions for the principal-value generator and residual diagnostics.
//! Outside the sampled range the field is taken to be zero (slices are only
//! splined when they have decayed at the grid edges).

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ComplexSpline {
    x0: f64,
    h: f64,
    values: Vec<Complex64>,
    second: Vec<Complex64>, // M_i, natural boundary (M = 0 at both ends)
}

impl ComplexSpline {
    pub fn new(x0: f64, h: f64, values: &[Complex64]) -> Result<Self> {
        let n = values.len();
        if n < 4 || !(h > 0.0) || !h.is_finite() || !x0.is_finite() {
            return Err(Error::Domain(format!(
                "spline needs >= 4 uniform samples with h > 0 (n = {n}, h = {h})"
            )));
        }
        // tridiagonal system for the interior second derivatives:
        // (1/6) M_{i-1} + (2/3) M_i + (1/6) M_{i+1} = (y_{i+1} - 2 y_i + y_{i-1}) / h^2
        let m = n - 2;
        let mut diag = vec![2.0 / 3.0; m];
        let mut rhs: Vec<Complex64> = (1..n - 1)
            .map(|i| (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h))
            .collect();
        // Thomas elimination (off-diagonals are all 1/6)
        for i in 1..m {
            let w = (1.0 / 6.0) / diag[i - 1];
            diag[i] -= w / 6.0;
            let prev = rhs[i - 1];
            rhs[i] -= w * prev;
        }
        let mut second = vec![Complex64::new(0.0, 0.0); n];
        if m > 0 {
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (1..m).rev() {
                second[i] = (rhs[i - 1] - second[i + 1] / 6.0) / diag[i - 1];
            }
        }
        Ok(Self {
            x0,
            h,
            values: values.to_vec(),
            second,
        })
    }

    /// Build from real samples.
    pub fn from_real(x0: f64, h: f64, values: &[f64]) -> Result<Self> {
        let cx: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::new(x0, h, &cx)
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let t = (x - self.x0) / self.h;
        if t < 0.0 || t > (self.values.len() - 1) as f64 {
            return None;
        }
        let i = (t.floor() as usize).min(self.values.len() - 2);
        Some((i, t - i as f64))
    }

    pub fn value(&self, x: f64) -> Complex64 {
        match self.locate(x) {
            None => Complex64::new(0.0, 0.0),
            Some((i, t)) => {
                let a = 1.0 - t;
                let b = t;
                a * self.values[i]
                    + b * self.values[i + 1]
                    + self.h * self.h / 6.0
                        * ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1])
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> Complex64 {
        match self.locate(x) {
            None => Complex64::new(0.0, 0.0),
            Some((i, t)) => (1.0 - t) * self.second[i] + t * self.second[i + 1],
        }
    }
}
