//! Restarted GMRES over the complex field with right diagonal
//! preconditioning.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) struct GmresOutcome {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Solves `A x = b`; `inv_diag` is the right preconditioner `M^{-1}`.
pub(crate) fn gmres(
    apply: &dyn Fn(&[Complex64], &mut [Complex64]),
    inv_diag: Option<&[Complex64]>,
    b: &[Complex64],
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> GmresOutcome {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![ZERO; n];
    if bnorm == 0.0 {
        return GmresOutcome {
            x,
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let precond = |v: &[Complex64], out: &mut [Complex64]| match inv_diag {
        Some(d) => out
            .iter_mut()
            .zip(v.iter().zip(d))
            .for_each(|(o, (a, m))| *o = a * m),
        None => out.copy_from_slice(v),
    };
    let m = restart.max(1);
    let mut r = vec![ZERO; n];
    let mut tmp = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    let mut iterations = 0;
    let mut best = (f64::INFINITY, x.clone());
    loop {
        apply(&x, &mut tmp);
        for i in 0..n {
            r[i] = b[i] - tmp[i];
        }
        let beta = norm(&r);
        let rel = beta / bnorm;
        if rel < best.0 {
            best = (rel, x.clone());
        }
        if rel <= tol || iterations >= max_iter {
            let converged = rel <= tol;
            return GmresOutcome {
                x: if converged { x } else { best.1 },
                iterations,
                residual: if converged { rel } else { best.0 },
                converged,
            };
        }
        let mut v: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|c| c / beta).collect());
        let mut hcols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<Complex64> = Vec::with_capacity(m);
        let mut g = vec![Complex64::new(beta, 0.0)];
        let mut k = 0;
        while k < m && iterations < max_iter {
            precond(&v[k], &mut tmp);
            apply(&tmp, &mut w);
            let mut col = vec![ZERO; k + 2];
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(vi, &w);
                col[i] = hij;
                for (wj, vj) in w.iter_mut().zip(vi) {
                    *wj -= hij * vj;
                }
            }
            let hn = norm(&w);
            col[k + 1] = Complex64::new(hn, 0.0);
            for i in 0..k {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = cs[i] * a + sn[i] * bb;
                col[i + 1] = -sn[i].conj() * a + cs[i] * bb;
            }
            let (a, bb) = (col[k], col[k + 1]);
            let rho = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            let (c, s) = if a.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0))
            } else {
                (a.norm() / rho, (a / a.norm()) * bb.conj() / rho)
            };
            col[k] = c * a + s * bb;
            col[k + 1] = ZERO;
            cs.push(c);
            sn.push(s);
            let gk = g[k];
            g[k] = c * gk;
            g.push(-s.conj() * gk);
            hcols.push(col);
            iterations += 1;
            k += 1;
            let est = g[k].norm() / bnorm;
            if hn == 0.0 || est <= tol * 0.5 {
                break;
            }
            v.push(w.iter().map(|c| c / hn).collect());
        }
        // back substitution for the k x k triangle
        let mut y = vec![ZERO; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= hcols[j][i] * y[j];
            }
            y[i] = s / hcols[i][i];
        }
        let mut update = vec![ZERO; n];
        for (j, yj) in y.iter().enumerate() {
            for (u, vj) in update.iter_mut().zip(&v[j]) {
                *u += yj * vj;
            }
        }
        precond(&update, &mut tmp);
        for i in 0..n {
            x[i] += tmp[i];
        }
    }
}
