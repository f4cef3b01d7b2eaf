//! Banded LU with partial pivoting, stored column-major in the usual
//! `2 kl + ku + 1` row layout so that row interchanges stay inside the band.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<Complex64>,
    piv: Vec<usize>,
}

impl BandedLu {
    /// Collects the entries of a matrix with lower bandwidth `kl` and upper
    /// bandwidth `ku` from a row-compressed description.
    pub fn from_csr(
        n: usize,
        kl: usize,
        ku: usize,
        row_ptr: &[usize],
        cols: &[usize],
        vals: &[Complex64],
    ) -> Result<Self> {
        let ld = 2 * kl + ku + 1;
        let mut ab = vec![Complex64::new(0.0, 0.0); ld * n];
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                let j = cols[k];
                if i > j + kl || j > i + ku {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) outside the band"
                    )));
                }
                ab[j * ld + kl + ku + i - j] = vals[k];
            }
        }
        let mut lu = Self {
            n,
            kl,
            ku,
            ld,
            ab,
            piv: vec![0; n],
        };
        lu.factor()?;
        Ok(lu)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        j * self.ld + self.kl + self.ku + i - j
    }

    fn factor(&mut self) -> Result<()> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let scale = self.ab.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = 0;
            let mut best = 0.0;
            for i in 0..=km {
                let v = self.ab[self.at(j + i, j)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            self.piv[j] = j + p;
            if !(best > 1e-300_f64.max(f64::EPSILON * 1e-6 * scale)) {
                return Err(Error::SingularSystem);
            }
            ju = ju.max((j + ku + p).min(n - 1));
            if p != 0 {
                for c in j..=ju {
                    let (a, b) = (self.at(j, c), self.at(j + p, c));
                    self.ab.swap(a, b);
                }
            }
            let inv = 1.0 / self.ab[self.at(j, j)];
            for i in 1..=km {
                let k = self.at(j + i, j);
                self.ab[k] *= inv;
            }
            for c in j + 1..=ju {
                let t = self.ab[self.at(j, c)];
                if t == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let base_l = self.at(j, j);
                let base_c = self.at(j, c);
                for i in 1..=km {
                    let l = self.ab[base_l + i];
                    self.ab[base_c + i] -= l * t;
                }
            }
        }
        Ok(())
    }

    /// Overwrites `b` with the solution of `A x = b`.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            let base = self.at(j, j);
            for i in 1..=km {
                b[j + i] -= self.ab[base + i] * bj;
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[self.at(j, j)];
            let bj = b[j];
            let lo = j.saturating_sub(kl + ku);
            for (i, bi) in b.iter_mut().enumerate().take(j).skip(lo) {
                *bi -= self.ab[self.at(i, j)] * bj;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_lu_on_random_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (n, kl, ku) = (40, 3, 5);
        let mut dense = DMatrix::<Complex64>::zeros(n, n);
        let (mut rp, mut cols, mut vals) = (vec![0], vec![], vec![]);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // small diagonal forces pivoting
                let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    * if i == j { 0.01 } else { 1.0 };
                dense[(i, j)] = v;
                cols.push(j);
                vals.push(v);
            }
            rp.push(cols.len());
        }
        let lu = BandedLu::from_csr(n, kl, ku, &rp, &cols, &vals).unwrap();
        let b: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let mut x = b.clone();
        lu.solve_in_place(&mut x);
        let r = &dense * DVector::from_vec(x) - DVector::from_vec(b);
        assert!(r.norm() < 1e-10);
    }

    #[test]
    fn singular_band_is_reported() {
        let rp = vec![0, 1, 2];
        let cols = vec![0, 0];
        let vals = vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        assert!(matches!(
            BandedLu::from_csr(2, 1, 1, &rp, &cols, &vals),
            Err(Error::SingularSystem)
        ));
    }
}
