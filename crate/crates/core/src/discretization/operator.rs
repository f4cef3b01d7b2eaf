//! Assembly of `A = -mu^{-1} Delta_h - z_eff` on the lattice.
//!
//! Interior rows carry the standard `(2N+1)`-point stencil scaled by
//! `-1/mu(x)`; nodes on the outer faces are Dirichlet (identity rows) and
//! their columns are dropped from interior rows. The sponge adds
//! `i sgn s(x)` to `z`, with the sign of the requested limit side.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::medium::MediumProfile;

/// Limit side of the spectral parameter: `z = lambda +- i eta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Side::Plus => "+",
            Side::Minus => "-",
        }
    }

    /// `lambda + i sgn eta`.
    pub fn z(self, lambda: f64, eta: f64) -> Complex64 {
        Complex64::new(lambda, self.sign() * eta)
    }
}

/// Complex field sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.node_count()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut x = vec![0.0; grid.dim];
        let values = (0..grid.node_count())
            .map(|i| {
                grid.coords(i, &mut x);
                f(&x)
            })
            .collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Sets the outer-face nodes to zero.
    pub fn clear_boundary(&mut self) {
        for i in 0..self.values.len() {
            if self.grid.is_boundary(i) {
                self.values[i] = Complex64::new(0.0, 0.0);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub grid: Grid,
    pub z: Complex64,
    pub side: Side,
    /// Resolved sponge strength (0 without a sponge).
    pub sigma0: f64,
    /// `mu` at the nodes.
    pub mu: Vec<f64>,
    /// `mu_0` at the nodes.
    pub mu0: Vec<f64>,
    /// Diagonal entries; 1 on Dirichlet rows.
    pub diag: Vec<Complex64>,
    /// `-1 / (h^2 mu)`, the off-diagonal entry of every interior row.
    pub off: Vec<f64>,
    pub interior: Vec<bool>,
}

/// Assembles the operator for `z` on the given limit side. A nonreal `z`
/// must lie on the half plane of `side`.
pub fn assemble(
    grid: &Grid,
    m: &MediumProfile,
    z: Complex64,
    side: Side,
) -> Result<DiscreteOperator> {
    if m.dim() != grid.dim {
        return Err(Error::ShapeMismatch {
            expected: grid.dim,
            found: m.dim(),
        });
    }
    if z.im != 0.0 && z.im.signum() != side.sign() {
        return Err(Error::InvalidArgument(format!(
            "Im z = {} disagrees with side {}",
            z.im,
            side.symbol()
        )));
    }
    let mu = m.mu_nodes(grid)?;
    let mu0 = m.mu0_nodes(grid);
    let mu_max = mu.iter().copied().fold(0.0, f64::max);
    grid.require_resolution((z.norm() * mu_max).sqrt())?;
    let sigma0 = match &grid.sponge {
        None => 0.0,
        Some(s) => s.strength.unwrap_or_else(|| {
            2.0 * mu0
                .iter()
                .map(|&v| wavenumber_scalar(z, v, side).re.abs())
                .fold(0.0, f64::max)
        }),
    };
    let n = grid.node_count();
    let h2 = grid.h * grid.h;
    let two_n = 2.0 * grid.dim as f64;
    let mut diag = vec![Complex64::new(1.0, 0.0); n];
    let mut off = vec![0.0; n];
    let mut interior = vec![false; n];
    let mut x = vec![0.0; grid.dim];
    for i in 0..n {
        if grid.is_boundary(i) {
            continue;
        }
        interior[i] = true;
        grid.coords(i, &mut x);
        let s = grid.sponge_profile(&x, sigma0);
        let z_eff = z + Complex64::new(0.0, side.sign() * s);
        off[i] = -1.0 / (h2 * mu[i]);
        diag[i] = Complex64::new(two_n / (h2 * mu[i]), 0.0) - z_eff;
    }
    Ok(DiscreteOperator {
        grid: grid.clone(),
        z,
        side,
        sigma0,
        mu,
        mu0,
        diag,
        off,
        interior,
    })
}

/// `[z nu]^{1/2}` with `Im k >= 0`; on the real axis the side picks the sign
/// of a real root.
pub fn wavenumber_scalar(z: Complex64, nu: f64, side: Side) -> Complex64 {
    let k = (z * nu).sqrt();
    if k.im < 0.0 {
        -k
    } else if k.im == 0.0 && side == Side::Minus {
        Complex64::new(-k.re.abs(), 0.0)
    } else if k.im == 0.0 {
        Complex64::new(k.re.abs(), 0.0)
    } else {
        k
    }
}

impl DiscreteOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `y = A u` on raw node arrays.
    pub fn apply(&self, u: &[Complex64], y: &mut [Complex64]) {
        let strides = self.grid.strides();
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            if !self.interior[i] {
                *yi = u[i];
                return;
            }
            let mut nb = Complex64::new(0.0, 0.0);
            for &s in &strides {
                if self.interior[i - s] {
                    nb += u[i - s];
                }
                if self.interior[i + s] {
                    nb += u[i + s];
                }
            }
            *yi = self.diag[i] * u[i] + self.off[i] * nb;
        });
    }

    pub fn matvec(&self, u: &GridFunction) -> Result<GridFunction> {
        if u.values.len() != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                found: u.values.len(),
            });
        }
        let mut out = GridFunction::zeros(&self.grid);
        self.apply(&u.values, &mut out.values);
        Ok(out)
    }

    /// Row-compressed form `(row_ptr, cols, vals)`.
    pub fn to_csr(&self) -> (Vec<usize>, Vec<usize>, Vec<Complex64>) {
        let strides = self.grid.strides();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..self.len() {
            if self.interior[i] {
                let mut entries: Vec<(usize, Complex64)> = vec![(i, self.diag[i])];
                for &s in &strides {
                    for j in [i - s, i + s] {
                        if self.interior[j] {
                            entries.push((j, Complex64::new(self.off[i], 0.0)));
                        }
                    }
                }
                entries.sort_by_key(|e| e.0);
                for (j, v) in entries {
                    cols.push(j);
                    vals.push(v);
                }
            } else {
                cols.push(i);
                vals.push(Complex64::new(1.0, 0.0));
            }
            row_ptr.push(cols.len());
        }
        (row_ptr, cols, vals)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.len();
        let mut a = DMatrix::zeros(n, n);
        let (row_ptr, cols, vals) = self.to_csr();
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                a[(i, cols[k])] = vals[k];
            }
        }
        a
    }

    /// Writes the matrix in MatrixMarket coordinate format.
    pub fn write_matrix_market(&self, out: &mut impl Write) -> Result<()> {
        let (row_ptr, cols, vals) = self.to_csr();
        writeln!(out, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(out, "{} {} {}", self.len(), self.len(), vals.len())?;
        for i in 0..self.len() {
            for k in row_ptr[i]..row_ptr[i + 1] {
                writeln!(
                    out,
                    "{} {} {:e} {:e}",
                    i + 1,
                    cols[k] + 1,
                    vals[k].re,
                    vals[k].im
                )?;
            }
        }
        Ok(())
    }

    /// Half bandwidth of the natural ordering.
    pub fn bandwidth(&self) -> usize {
        self.grid.strides()[0]
    }

    /// `<u, v>_X = sum mu u conj(v) h^N`.
    pub fn inner_x(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let w = self.grid.cell_volume();
        u.iter()
            .zip(v)
            .zip(&self.mu)
            .map(|((a, b), m)| a * b.conj() * *m)
            .sum::<Complex64>()
            * w
    }

    pub fn norm_x(&self, u: &[Complex64]) -> f64 {
        self.inner_x(u, u).re.max(0.0).sqrt()
    }
}

/// `Delta_h u` at interior nodes (zero on the outer faces); values outside
/// the box count as zero.
pub fn laplacian_h(grid: &Grid, u: &[Complex64]) -> Vec<Complex64> {
    let strides = grid.strides();
    let h2 = grid.h * grid.h;
    let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
    out.par_iter_mut().enumerate().for_each(|(i, o)| {
        if grid.is_boundary(i) {
            return;
        }
        let mut s = -2.0 * grid.dim as f64 * u[i];
        for &st in &strides {
            s += u[i - st] + u[i + st];
        }
        *o = s / h2;
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::grid::{build_grid, Sponge};
    use crate::geometry::{outward_increasing_nus, LayeredPartition};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn layered(dim: usize) -> MediumProfile {
        let p =
            LayeredPartition::planar_stack(dim, vec![-2.5, -1.0, 1.5, 3.0], None, None).unwrap();
        let nus = outward_increasing_nus(&p.index_set, 1.0, 0.3);
        MediumProfile::new(p, nus, None).unwrap()
    }

    fn random_field(grid: &Grid, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..grid.node_count())
            .map(|i| {
                if grid.is_boundary(i) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                }
            })
            .collect()
    }

    #[test]
    fn matvec_matches_dense() {
        let g = build_grid(2, 4.0, 0.25, Some(Sponge::default_for(4.0))).unwrap();
        let a = assemble(&g, &layered(2), Complex64::new(1.0, 0.1), Side::Plus).unwrap();
        let dense = a.to_dense();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u: Vec<Complex64> = (0..g.node_count())
            .map(|_| Complex64::new(rng.gen(), rng.gen()))
            .collect();
        let mut y = vec![Complex64::new(0.0, 0.0); u.len()];
        a.apply(&u, &mut y);
        let yd = &dense * nalgebra::DVector::from_vec(u.clone());
        for i in 0..u.len() {
            assert!((y[i] - yd[i]).norm() < 1e-13 * (1.0 + y[i].norm()));
        }
        // column j of A
        let j = g.index_of(&[5, 9]);
        let mut e = vec![Complex64::new(0.0, 0.0); u.len()];
        e[j] = Complex64::new(1.0, 0.0);
        a.apply(&e, &mut y);
        for i in 0..u.len() {
            assert_eq!(y[i], dense[(i, j)]);
        }
    }

    #[test]
    fn hermitian_in_x_without_sponge() {
        let g = build_grid(2, 4.0, 0.125, None).unwrap();
        let a = assemble(&g, &layered(2), Complex64::new(0.7, 0.0), Side::Plus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let u = random_field(&g, &mut rng);
            let v = random_field(&g, &mut rng);
            let mut au = vec![Complex64::new(0.0, 0.0); u.len()];
            let mut av = au.clone();
            a.apply(&u, &mut au);
            a.apply(&v, &mut av);
            let lhs = a.inner_x(&au, &v);
            let rhs = a.inner_x(&u, &av);
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn dump_has_header_and_counts() {
        let g = build_grid(2, 4.0, 0.25, None).unwrap();
        let a = assemble(
            &g,
            &MediumProfile::homogeneous(2, 1.0).unwrap(),
            Complex64::new(1.0, 0.0),
            Side::Plus,
        )
        .unwrap();
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("%%MatrixMarket"));
        let nnz: usize = lines
            .next()
            .unwrap()
            .split(' ')
            .nth(2)
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(lines.count(), nnz);
        // interior rows: 2N+1 entries away from the faces
        let (rp, _, _) = a.to_csr();
        let i = g.index_of(&[10, 10]);
        assert_eq!(rp[i + 1] - rp[i], 5);
    }

    #[test]
    fn side_must_match_half_plane() {
        let g = build_grid(2, 4.0, 0.25, None).unwrap();
        let m = MediumProfile::homogeneous(2, 1.0).unwrap();
        assert!(assemble(&g, &m, Complex64::new(1.0, -0.1), Side::Plus).is_err());
        assert!(assemble(&g, &m, Complex64::new(25.0, 0.0), Side::Plus).is_err());
    }

    #[test]
    fn branch_rule() {
        let k = wavenumber_scalar(Complex64::new(1.0, 0.0), 4.0, Side::Plus);
        assert_eq!(k, Complex64::new(2.0, 0.0));
        let k = wavenumber_scalar(Complex64::new(0.0, 1.0), 1.0, Side::Plus);
        assert!((k.re - 0.5f64.sqrt()).abs() < 1e-15 && (k.im - 0.5f64.sqrt()).abs() < 1e-15);
        let k = wavenumber_scalar(Complex64::new(-1.0, 0.0), 1.0, Side::Plus);
        assert_eq!(k, Complex64::new(0.0, 1.0));
        let k = wavenumber_scalar(Complex64::new(1.0, 0.0), 1.0, Side::Minus);
        assert_eq!(k, Complex64::new(-1.0, 0.0));
    }
}
