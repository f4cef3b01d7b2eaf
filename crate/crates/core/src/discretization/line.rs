//! One-dimensional assembly with Robin ends `u' = -+ i k u`, used for the
//! comparisons against the exact stratified solutions.

use num_complex::Complex64;

use super::operator::{wavenumber_scalar, Side};
use crate::error::{Error, Result};
use crate::oracle1d::Stratified;

/// Tridiagonal system `sub[i] u[i-1] + diag[i] u[i] + sup[i] u[i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * u[i];
                if i > 0 {
                    y += self.sub[i] * u[i - 1];
                }
                if i + 1 < n {
                    y += self.sup[i] * u[i + 1];
                }
                y
            })
            .collect()
    }
}

/// Uniform nodes `a + i h`, `i = 0..n`, carrying `-mu^{-1} u'' - z u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineOperator {
    pub a: f64,
    pub h: f64,
    pub mu: Vec<f64>,
    pub z: Complex64,
    pub side: Side,
    pub matrix: Tridiagonal,
}

impl LineOperator {
    /// Assembles on `[a, b]`; interface nodes take the mean of the two
    /// adjacent values.
    pub fn assemble(
        medium: &Stratified,
        a: f64,
        b: f64,
        h: f64,
        z: Complex64,
        side: Side,
    ) -> Result<Self> {
        let cells = (b - a) / h;
        if !(cells >= 2.0) || (cells - cells.round()).abs() > 1e-9 * cells {
            return Err(Error::InvalidGrid(format!(
                "[{a}, {b}] is not a multiple of h = {h}"
            )));
        }
        let n = cells.round() as usize + 1;
        let mu: Vec<f64> = (0..n)
            .map(|i| medium.nu_at(a + i as f64 * h, h / 2.0))
            .collect();
        let h2 = h * h;
        let mut sub = vec![Complex64::new(0.0, 0.0); n];
        let mut diag = vec![Complex64::new(0.0, 0.0); n];
        let mut sup = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let c = 1.0 / (h2 * mu[i]);
            diag[i] = Complex64::new(2.0 * c, 0.0) - z;
            if i > 0 {
                sub[i] = Complex64::new(-c, 0.0);
            }
            if i + 1 < n {
                sup[i] = Complex64::new(-c, 0.0);
            }
        }
        // ghost nodes u_{-1} = u_1 + 2 i k h u_0 and its mirror image
        for end in [0, n - 1] {
            let c = 1.0 / (h2 * mu[end]);
            let k = wavenumber_scalar(z, mu[end], side);
            diag[end] -= Complex64::new(0.0, 2.0 * h) * k * c;
            if end == 0 {
                sup[0] = Complex64::new(-2.0 * c, 0.0);
            } else {
                sub[end] = Complex64::new(-2.0 * c, 0.0);
            }
        }
        Ok(Self {
            a,
            h,
            mu,
            z,
            side,
            matrix: Tridiagonal { sub, diag, sup },
        })
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn node(&self, i: usize) -> f64 {
        self.a + i as f64 * self.h
    }

    /// Right-hand side `g / mu` for the equation `-u'' - z mu u = g`, with
    /// a point mass realized as `strength / h` at its node.
    pub fn rhs(&self, source: &crate::oracle1d::Source) -> Result<Vec<Complex64>> {
        let mut f = vec![Complex64::new(0.0, 0.0); self.len()];
        match source {
            crate::oracle1d::Source::Point { at, strength } => {
                let pos = (at - self.a) / self.h;
                if (pos - pos.round()).abs() > 1e-9
                    || pos < 0.0
                    || pos.round() as usize >= self.len()
                {
                    return Err(Error::InvalidArgument(format!(
                        "point source at {at} is not a node"
                    )));
                }
                let i = pos.round() as usize;
                f[i] = Complex64::new(strength / (self.h * self.mu[i]), 0.0);
            }
            crate::oracle1d::Source::Piecewise { .. } => {
                for (i, fi) in f.iter_mut().enumerate() {
                    *fi = Complex64::new(
                        source.density(self.node(i), self.h / 2.0) / self.mu[i],
                        0.0,
                    );
                }
            }
        }
        Ok(f)
    }
}
