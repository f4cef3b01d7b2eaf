//! Exact solutions of `-u'' - z nu(x) u = g` on a planar stack with
//! outgoing (or incoming) ends.
//!
//! On every interval the solution is written with locally referenced
//! exponentials `A e^{ik(x-L)} + B e^{-ik(x-R)} + p`, so no factor ever
//! exceeds one in modulus, and all matching conditions are solved as one
//! linear system.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretization::operator::{wavenumber_scalar, Side};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Piecewise constant `nu` on `R`: `nus[0]` left of `breakpoints[0]`,
/// `nus[j]` on `(breakpoints[j-1], breakpoints[j])`, the last value to the
/// right of the last breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratified {
    pub breakpoints: Vec<f64>,
    pub nus: Vec<f64>,
}

impl Stratified {
    pub fn new(breakpoints: Vec<f64>, nus: Vec<f64>) -> Result<Self> {
        if nus.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidMedium(format!(
                "{} breakpoints need {} values of nu, found {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                nus.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1])
            || breakpoints.iter().any(|b| !b.is_finite())
        {
            return Err(Error::InvalidGeometry(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if nus.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidMedium("every nu must be positive".into()));
        }
        Ok(Self { breakpoints, nus })
    }

    pub fn homogeneous(nu: f64) -> Self {
        Self {
            breakpoints: vec![],
            nus: vec![nu],
        }
    }

    /// `nu` at `x`; within `tie` of a breakpoint the mean of both sides.
    pub fn nu_at(&self, x: f64, tie: f64) -> f64 {
        for (j, &b) in self.breakpoints.iter().enumerate() {
            if (x - b).abs() < tie {
                return 0.5 * (self.nus[j] + self.nus[j + 1]);
            }
        }
        self.nus[self.breakpoints.iter().filter(|&&b| b < x).count()]
    }
}

/// Right-hand side `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Source {
    /// `strength * delta(x - at)`.
    Point { at: f64, strength: f64 },
    /// `values[j]` on `(breakpoints[j], breakpoints[j+1])`, zero outside.
    Piecewise {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Source {
    pub fn check(&self) -> Result<()> {
        match self {
            Source::Point { at, strength } if at.is_finite() && strength.is_finite() => Ok(()),
            Source::Piecewise {
                breakpoints,
                values,
            } if values.len() + 1 == breakpoints.len()
                && breakpoints.windows(2).all(|w| w[0] < w[1]) =>
            {
                Ok(())
            }
            _ => Err(Error::InvalidArgument("malformed source".into())),
        }
    }

    fn cuts(&self) -> Vec<f64> {
        match self {
            Source::Point { at, .. } => vec![*at],
            Source::Piecewise { breakpoints, .. } => breakpoints.clone(),
        }
    }

    /// Density of the piecewise source; the mean at jumps within `tie`.
    pub fn density(&self, x: f64, tie: f64) -> f64 {
        let Source::Piecewise {
            breakpoints,
            values,
        } = self
        else {
            return 0.0;
        };
        let value = |j: isize| {
            if j < 0 || j as usize >= values.len() {
                0.0
            } else {
                values[j as usize]
            }
        };
        for (j, &b) in breakpoints.iter().enumerate() {
            if (x - b).abs() < tie {
                return 0.5 * (value(j as isize - 1) + value(j as isize));
            }
        }
        value(breakpoints.iter().filter(|&&b| b < x).count() as isize - 1)
    }
}

/// Closed-form solution: per interval `(L_j, R_j)` with `nu_j`, `k_j` and
/// coefficients `A_j`, `B_j` and particular part `p_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    /// Interior cut points `c_1 < .. < c_m`; interval `j` is `(c_j, c_{j+1})`
    /// with `c_0 = -inf`, `c_{m+1} = +inf`.
    pub cuts: Vec<f64>,
    pub k: Vec<Complex64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub p: Vec<Complex64>,
    pub z: Complex64,
}

impl ExactSolution {
    fn interval(&self, x: f64) -> usize {
        self.cuts.iter().filter(|&&c| c <= x).count()
    }

    fn parts(&self, j: usize, x: f64) -> (Complex64, Complex64) {
        let m = self.cuts.len();
        let k = self.k[j];
        let ea = if j == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            (I * k * (x - self.cuts[j - 1])).exp()
        };
        let eb = if j == m {
            Complex64::new(0.0, 0.0)
        } else {
            (I * k * (self.cuts[j] - x)).exp()
        };
        (ea, eb)
    }

    pub fn value(&self, x: f64) -> Complex64 {
        let j = self.interval(x);
        let (ea, eb) = self.parts(j, x);
        self.a[j] * ea + self.b[j] * eb + self.p[j]
    }

    pub fn derivative(&self, x: f64) -> Complex64 {
        let j = self.interval(x);
        let (ea, eb) = self.parts(j, x);
        I * self.k[j] * (self.a[j] * ea - self.b[j] * eb)
    }

    pub fn second_derivative(&self, x: f64) -> Complex64 {
        let j = self.interval(x);
        let (ea, eb) = self.parts(j, x);
        -self.k[j] * self.k[j] * (self.a[j] * ea + self.b[j] * eb)
    }

    /// One-sided limits `(u(c-), u(c+), u'(c-), u'(c+))` at a cut.
    pub fn one_sided(&self, c: usize) -> (Complex64, Complex64, Complex64, Complex64) {
        let x = self.cuts[c];
        let (l, r) = (c, c + 1);
        let (la, lb) = self.parts(l, x);
        let (ra, rb) = self.parts(r, x);
        (
            self.a[l] * la + self.b[l] * lb + self.p[l],
            self.a[r] * ra + self.b[r] * rb + self.p[r],
            I * self.k[l] * (self.a[l] * la - self.b[l] * lb),
            I * self.k[r] * (self.a[r] * ra - self.b[r] * rb),
        )
    }

    /// Samples `(x, u(x))`.
    pub fn sample(&self, xs: &[f64]) -> Vec<(f64, Complex64)> {
        xs.iter().map(|&x| (x, self.value(x))).collect()
    }
}

/// Transfer matrix of a homogeneous slab of width `d`, mapping `(u, u')` at
/// the left face to the right face.
pub fn transfer_matrix(k: Complex64, d: f64) -> [[Complex64; 2]; 2] {
    let kd = k * d;
    let (s, c) = (kd.sin(), kd.cos());
    let sk = if k.norm() == 0.0 {
        Complex64::new(d, 0.0)
    } else {
        s / k
    };
    [[c, sk], [-k * s, c]]
}

/// Solves `-u'' - z nu u = g` with radiating ends on the given side. The
/// source must vanish outside the window spanned by the stack breakpoints
/// and its own support.
pub fn exact_solve(
    stack: &Stratified,
    z: Complex64,
    side: Side,
    source: &Source,
) -> Result<ExactSolution> {
    source.check()?;
    if z.norm() == 0.0 {
        return Err(Error::InvalidArgument(
            "z = 0 has no outgoing solution".into(),
        ));
    }
    if z.im != 0.0 && z.im.signum() != side.sign() {
        return Err(Error::InvalidArgument(
            "Im z disagrees with the side".into(),
        ));
    }
    let mut cuts: Vec<f64> = stack
        .breakpoints
        .iter()
        .copied()
        .chain(source.cuts())
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
    let m = cuts.len();
    let n_int = m + 1;
    let mid = |j: usize| -> f64 {
        match (j, m) {
            (_, 0) => 0.0,
            (0, _) => cuts[0] - 1.0,
            (j, m) if j == m => cuts[m - 1] + 1.0,
            (j, _) => 0.5 * (cuts[j - 1] + cuts[j]),
        }
    };
    let mut k = Vec::with_capacity(n_int);
    let mut p = Vec::with_capacity(n_int);
    for j in 0..n_int {
        let x = mid(j);
        let nu = stack.nu_at(x, 0.0);
        let kj = wavenumber_scalar(z, nu, side);
        let g = source.density(x, 0.0);
        if (j == 0 || j == m) && g != 0.0 {
            return Err(Error::InvalidArgument(
                "source must be compactly supported".into(),
            ));
        }
        k.push(kj);
        p.push(-Complex64::new(g, 0.0) / (kj * kj));
    }
    // unknowns [A_0, B_0, A_1, B_1, ...]; A_0 = 0 and B_m = 0
    let size = 2 * n_int;
    let mut mat = DMatrix::<Complex64>::zeros(size, size);
    let mut rhs = DVector::<Complex64>::zeros(size);
    mat[(0, 0)] = Complex64::new(1.0, 0.0);
    mat[(size - 1, size - 1)] = Complex64::new(1.0, 0.0);
    let jump = |c: f64| match source {
        Source::Point { at, strength } if (at - c).abs() <= 1e-14 * c.abs().max(1.0) => -*strength,
        _ => 0.0,
    };
    for (i, &c) in cuts.iter().enumerate() {
        let (l, r) = (i, i + 1);
        let left_a = if l == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            (I * k[l] * (c - cuts[l - 1])).exp()
        };
        let right_b = if r == m {
            Complex64::new(0.0, 0.0)
        } else {
            (I * k[r] * (cuts[r] - c)).exp()
        };
        let row_u = 1 + 2 * i;
        let row_d = 2 + 2 * i;
        // u(c+) - u(c-) = 0
        mat[(row_u, 2 * r)] = Complex64::new(1.0, 0.0);
        mat[(row_u, 2 * r + 1)] = right_b;
        mat[(row_u, 2 * l)] = -left_a;
        mat[(row_u, 2 * l + 1)] = Complex64::new(-1.0, 0.0);
        rhs[row_u] = p[l] - p[r];
        // u'(c+) - u'(c-) = -strength
        mat[(row_d, 2 * r)] = I * k[r];
        mat[(row_d, 2 * r + 1)] = -I * k[r] * right_b;
        mat[(row_d, 2 * l)] = -I * k[l] * left_a;
        mat[(row_d, 2 * l + 1)] = I * k[l];
        rhs[row_d] = Complex64::new(jump(c), 0.0);
    }
    let scale = mat.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let lu = mat.clone().lu();
    let u = lu.u();
    let min_pivot = (0..size)
        .map(|i| u[(i, i)].norm())
        .fold(f64::INFINITY, f64::min);
    if !(min_pivot > 1e-13 * scale) {
        return Err(Error::DegenerateSystem);
    }
    let sol = lu.solve(&rhs).ok_or(Error::DegenerateSystem)?;
    if sol.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::DegenerateSystem);
    }
    let a = (0..n_int).map(|j| sol[2 * j]).collect();
    let b = (0..n_int).map(|j| sol[2 * j + 1]).collect();
    Ok(ExactSolution {
        cuts,
        k,
        a,
        b,
        p,
        z,
    })
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    // a fixed first split keeps oscillatory integrands from fooling the test
    let pieces = 16;
    let w = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * w, a + (i + 1) as f64 * w);
            let (f0, f1, fmid) = (f(x0), f(x1), f(0.5 * (x0 + x1)));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fmid + f1);
            rec(f, x0, x1, f0, fmid, f1, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// `int_{-X}^{X} (1+|x|)^{2t} |u(x)|^2 dx`, split at every kink of `u`.
pub fn weighted_l2_sq(
    u: &dyn Fn(f64) -> Complex64,
    t: f64,
    x_max: f64,
    kinks: &[f64],
    tol: f64,
) -> f64 {
    let mut pts: Vec<f64> = kinks.iter().copied().filter(|c| c.abs() < x_max).collect();
    pts.extend([-x_max, x_max, 0.0]);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let f = |x: f64| (1.0 + x.abs()).powf(2.0 * t) * u(x).norm_sqr();
    pts.windows(2)
        .map(|w| adaptive_simpson(&f, w[0], w[1], tol))
        .sum()
}

/// One row of the exact limiting absorption table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRow {
    pub eta: f64,
    pub norm_u: f64,
    /// `||u_eta - u_{previous eta}||`, absent for the first row.
    pub diff_prev: Option<f64>,
}

/// Exact `||u_eta||_{-delta}` on `[-X, X]` along a decreasing ladder, and
/// the Cauchy differences between consecutive rungs.
pub fn lap_limit_exact(
    stack: &Stratified,
    lambda: f64,
    eta_list: &[f64],
    source: &Source,
    side: Side,
    delta: f64,
    x_max: f64,
) -> Result<Vec<ExactRow>> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument("lambda must be positive".into()));
    }
    if eta_list.windows(2).any(|w| w[1] >= w[0]) || eta_list.iter().any(|&e| e < 0.0) {
        return Err(Error::InvalidArgument(
            "eta list must be decreasing and nonnegative".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut prev: Option<ExactSolution> = None;
    for &eta in eta_list {
        let sol = exact_solve(stack, side.z(lambda, eta), side, source)?;
        let kinks = sol.cuts.clone();
        let norm_u = weighted_l2_sq(&|x| sol.value(x), -delta, x_max, &kinks, 1e-10).sqrt();
        let diff_prev = prev.as_ref().map(|q| {
            weighted_l2_sq(&|x| sol.value(x) - q.value(x), -delta, x_max, &kinks, 1e-10).sqrt()
        });
        rows.push(ExactRow {
            eta,
            norm_u,
            diff_prev,
        });
        prev = Some(sol);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transfer_examples() {
        let t = transfer_matrix(c(1.3, 0.2), 0.0);
        assert_eq!(t, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        let t = transfer_matrix(c(1.0, 0.0), std::f64::consts::PI);
        assert!((t[0][0] + 1.0).norm() < 1e-15 && t[0][1].norm() < 1e-15);
        assert!(t[1][0].norm() < 1e-15 && (t[1][1] + 1.0).norm() < 1e-15);
        for (k, d) in [(c(0.3, 0.7), 2.0), (c(2.0, 0.01), 5.5), (c(0.0, 1.0), 3.0)] {
            let t = transfer_matrix(k, d);
            let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
            assert!((det - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn homogeneous_point_source() {
        let s = Stratified::homogeneous(1.0);
        let sol = exact_solve(
            &s,
            c(1.0, 0.0),
            Side::Plus,
            &Source::Point {
                at: 0.0,
                strength: 1.0,
            },
        )
        .unwrap();
        for x in [-3.0, -0.5, 0.25, 2.0, 7.5] {
            let expect = c(0.0, 0.5) * (I * f64::abs(x)).exp();
            assert!((sol.value(x) - expect).norm() < 1e-13);
            // -u'' - u = 0 away from the source
            assert!((-sol.second_derivative(x) - sol.value(x)).norm() < 1e-12);
        }
        let (_, _, dl, dr) = sol.one_sided(0);
        assert!((dr - dl + 1.0).norm() < 1e-13);
    }

    #[test]
    fn single_interface_reflection() {
        let (nu1, nu2) = (1.0, 2.5);
        let s = Stratified::new(vec![0.0], vec![nu1, nu2]).unwrap();
        let z = c(1.7, 0.0);
        let y = -2.0;
        let sol = exact_solve(
            &s,
            z,
            Side::Plus,
            &Source::Point {
                at: y,
                strength: 1.0,
            },
        )
        .unwrap();
        let (k1, k2) = ((z * nu1).sqrt(), (z * nu2).sqrt());
        let inc = |x: f64| I / (2.0 * k1) * (I * k1 * (x - y)).exp();
        let r = (sol.value(-1e-12) - inc(0.0)) / inc(0.0);
        assert!((r - (k1 - k2) / (k1 + k2)).norm() < 1e-10);
    }

    #[test]
    fn absorbing_solutions_decay() {
        let s = Stratified::new(vec![-1.0, 0.5, 2.0], vec![1.5, 1.0, 2.0, 3.0]).unwrap();
        let src = Source::Piecewise {
            breakpoints: vec![-0.5, 0.0, 0.4],
            values: vec![1.0, -2.0],
        };
        let sol = exact_solve(&s, c(1.0, 0.3), Side::Plus, &src).unwrap();
        assert!(sol.value(-80.0).norm() < 1e-4 * sol.value(0.0).norm());
        assert!(sol.value(80.0).norm() < 1e-4 * sol.value(0.0).norm());
        let scale = (-5..=5)
            .map(|i| sol.value(i as f64 * 0.5).norm())
            .fold(0.0, f64::max);
        for cut in 0..sol.cuts.len() {
            let (ul, ur, dl, dr) = sol.one_sided(cut);
            assert!((ul - ur).norm() + (dl - dr).norm() <= 1e-10 * scale);
        }
        // ODE residual at collocation points
        for x in [-3.0, -0.75, -0.2, 0.2, 1.0, 3.0] {
            let nu = s.nu_at(x, 0.0);
            let res = -sol.second_derivative(x) - sol.z * nu * sol.value(x) - src.density(x, 0.0);
            assert!(res.norm() < 1e-10);
        }
    }

    #[test]
    fn real_axis_matches_limit() {
        let s = Stratified::new(vec![-1.0, 1.0], vec![2.0, 1.0, 3.0]).unwrap();
        let src = Source::Point {
            at: 0.0,
            strength: 1.0,
        };
        let at0 = exact_solve(&s, c(1.0, 0.0), Side::Plus, &src).unwrap();
        let near = exact_solve(&s, c(1.0, 1e-10), Side::Plus, &src).unwrap();
        for x in [-2.0, 0.3, 1.7] {
            assert!((at0.value(x) - near.value(x)).norm() < 1e-8);
        }
        let minus = exact_solve(&s, c(1.0, 0.0), Side::Minus, &src).unwrap();
        assert!((minus.value(0.7) - at0.value(0.7).conj()).norm() < 1e-12);
    }

    #[test]
    fn simpson_integrates_polynomials_and_exponentials() {
        let v = adaptive_simpson(&|x| x * x, 0.0, 3.0, 1e-12);
        assert!((v - 9.0).abs() < 1e-12);
        let v = adaptive_simpson(&|x| (-x).exp(), 0.0, 10.0, 1e-12);
        assert!((v - (1.0 - (-10.0f64).exp())).abs() < 1e-11);
    }

    #[test]
    fn exact_limit_table_is_cauchy() {
        let s = Stratified::new(vec![-1.0, 1.0], vec![2.0, 1.0, 3.0]).unwrap();
        let src = Source::Point {
            at: 0.0,
            strength: 1.0,
        };
        // once eta is well below 1/X the truncated differences halve with eta
        let etas: Vec<f64> = (0..10).map(|i| 0.5f64.powi(i)).collect();
        let rows = lap_limit_exact(&s, 1.0, &etas, &src, Side::Plus, 0.75, 20.0).unwrap();
        let diffs: Vec<f64> = rows.iter().filter_map(|r| r.diff_prev).collect();
        for w in diffs[diffs.len() - 4..].windows(2) {
            let ratio = w[1] / w[0];
            assert!(ratio > 0.3 && ratio < 0.75, "{ratio}");
        }
    }
}
