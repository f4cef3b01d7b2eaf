//! Linear solvers for `(H_h - z) u = f` and the resolvent probe used to
//! detect eigenvalues.

mod banded;
mod gmres;
pub mod probe;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use banded::BandedLu;
pub use probe::{eig_probe, random_samples, ProbeCurve, ProbePoint, ProbeVerdict};

use crate::discretization::{DiscreteOperator, GridFunction, Tridiagonal};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Restarted GMRES.
    Krylov,
    /// Dense LU, for tiny grids.
    DenseDirect,
    /// Tridiagonal elimination, for 1-D systems.
    Tridiagonal,
    /// Banded LU in the natural ordering; factors once per operator.
    BandedDirect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preconditioner {
    None,
    DiagonalComplexShift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveOptions {
    pub method: Method,
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
    pub preconditioner: Preconditioner,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: Method::Krylov,
            tol: 1e-8,
            max_iter: 20_000,
            restart: 200,
            preconditioner: Preconditioner::DiagonalComplexShift,
        }
    }
}

impl SolveOptions {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "tol = {} not in (0, 1e-2]",
                self.tol
            )));
        }
        if self.max_iter == 0 || self.restart == 0 {
            return Err(Error::InvalidArgument(
                "max_iter and restart must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub method: Method,
    pub iterations: usize,
    /// Relative residual `||A u - f|| / ||f||`.
    pub residual: f64,
}

enum Prepared {
    Krylov(Option<Vec<Complex64>>),
    Banded(BandedLu),
    Dense(nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>),
}

/// An operator made ready for repeated solves; direct methods factor once.
pub struct PreparedSolver<'a> {
    op: &'a DiscreteOperator,
    opts: SolveOptions,
    inner: Prepared,
}

impl<'a> PreparedSolver<'a> {
    pub fn new(op: &'a DiscreteOperator, opts: &SolveOptions) -> Result<Self> {
        opts.check()?;
        let inner = match opts.method {
            Method::Krylov => Prepared::Krylov(match opts.preconditioner {
                Preconditioner::None => None,
                Preconditioner::DiagonalComplexShift => {
                    Some(op.diag.iter().map(|d| 1.0 / d).collect())
                }
            }),
            Method::BandedDirect => {
                let (rp, cols, vals) = op.to_csr();
                let bw = op.bandwidth();
                Prepared::Banded(BandedLu::from_csr(op.len(), bw, bw, &rp, &cols, &vals)?)
            }
            Method::DenseDirect => {
                let lu = op.to_dense().lu();
                if !lu.is_invertible() {
                    return Err(Error::SingularSystem);
                }
                Prepared::Dense(lu)
            }
            Method::Tridiagonal => {
                return Err(Error::InvalidArgument(
                    "tridiagonal elimination applies to 1-D systems only".into(),
                ))
            }
        };
        Ok(Self {
            op,
            opts: opts.clone(),
            inner,
        })
    }

    pub fn solve(&self, f: &GridFunction) -> Result<(GridFunction, SolveStats)> {
        let n = self.op.len();
        if f.values.len() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: f.values.len(),
            });
        }
        let fnorm = f.values.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if fnorm == 0.0 {
            return Ok((
                GridFunction::zeros(&self.op.grid),
                SolveStats {
                    method: self.opts.method,
                    iterations: 0,
                    residual: 0.0,
                },
            ));
        }
        let (values, iterations) = match &self.inner {
            Prepared::Krylov(inv) => {
                let apply = |u: &[Complex64], y: &mut [Complex64]| self.op.apply(u, y);
                let out = gmres::gmres(
                    &apply,
                    inv.as_deref(),
                    &f.values,
                    self.opts.tol,
                    self.opts.restart,
                    self.opts.max_iter,
                );
                if !out.converged {
                    return Err(Error::NoConvergence {
                        iterations: out.iterations,
                        residual: out.residual,
                        best: out.x,
                    });
                }
                (out.x, out.iterations)
            }
            Prepared::Banded(lu) => {
                let mut x = f.values.clone();
                lu.solve_in_place(&mut x);
                (x, 1)
            }
            Prepared::Dense(lu) => {
                let x = lu
                    .solve(&DVector::from_column_slice(&f.values))
                    .ok_or(Error::SingularSystem)?;
                (x.iter().copied().collect(), 1)
            }
        };
        let mut r = vec![Complex64::new(0.0, 0.0); n];
        self.op.apply(&values, &mut r);
        let residual = r
            .iter()
            .zip(&f.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / fnorm;
        let u = GridFunction {
            grid: self.op.grid.clone(),
            values,
        };
        if !u.is_finite() {
            return Err(Error::SingularSystem);
        }
        Ok((
            u,
            SolveStats {
                method: self.opts.method,
                iterations,
                residual,
            },
        ))
    }
}

/// One-shot solve of `A u = f`.
pub fn solve(
    op: &DiscreteOperator,
    f: &GridFunction,
    opts: &SolveOptions,
) -> Result<(GridFunction, SolveStats)> {
    PreparedSolver::new(op, opts)?.solve(f)
}

/// Solves a tridiagonal system by banded elimination with pivoting.
pub fn solve_tridiagonal(t: &Tridiagonal, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = t.len();
    if rhs.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    let (mut rp, mut cols, mut vals) = (
        vec![0],
        Vec::with_capacity(3 * n),
        Vec::with_capacity(3 * n),
    );
    for i in 0..n {
        if i > 0 {
            cols.push(i - 1);
            vals.push(t.sub[i]);
        }
        cols.push(i);
        vals.push(t.diag[i]);
        if i + 1 < n {
            cols.push(i + 1);
            vals.push(t.sup[i]);
        }
        rp.push(cols.len());
    }
    let lu = BandedLu::from_csr(n, 1, 1, &rp, &cols, &vals)?;
    let mut x = rhs.to_vec();
    lu.solve_in_place(&mut x);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{assemble, build_grid, Side, Sponge};
    use crate::medium::MediumProfile;
    use crate::oracle1d::{Source, Stratified};

    #[test]
    fn zero_rhs_gives_zero() {
        let g = build_grid(2, 4.0, 0.25, None).unwrap();
        let a = assemble(
            &g,
            &MediumProfile::homogeneous(2, 1.0).unwrap(),
            Complex64::new(1.0, 0.5),
            Side::Plus,
        )
        .unwrap();
        let (u, s) = solve(&a, &GridFunction::zeros(&g), &SolveOptions::default()).unwrap();
        assert_eq!(s.iterations, 0);
        assert!(u.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn krylov_banded_and_dense_agree() {
        for dim in [2, 3] {
            let g = build_grid(dim, 4.0, 0.25, Some(Sponge::default_for(4.0))).unwrap();
            let m = MediumProfile::homogeneous(dim, 1.0).unwrap();
            let a = assemble(&g, &m, Complex64::new(1.0, 0.2), Side::Plus).unwrap();
            let mut f = GridFunction::from_fn(&g, |x| {
                Complex64::new((-x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
            });
            f.clear_boundary();
            let (uk, sk) = solve(&a, &f, &SolveOptions::default()).unwrap();
            assert!(sk.residual <= 1e-8);
            let reference = if dim == 2 {
                SolveOptions::with_method(Method::BandedDirect)
            } else {
                SolveOptions {
                    tol: 1e-12,
                    ..SolveOptions::default()
                }
            };
            let (ub, _) = solve(&a, &f, &reference).unwrap();
            let diff: f64 = uk
                .values
                .iter()
                .zip(&ub.values)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let scale: f64 = ub.values.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            assert!(diff <= 1e-6 * scale, "{dim}: {diff}");
            if dim == 2 {
                let (ud, _) =
                    solve(&a, &f, &SolveOptions::with_method(Method::DenseDirect)).unwrap();
                let d2: f64 = ud
                    .values
                    .iter()
                    .zip(&ub.values)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(d2 <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn robin_line_matches_outgoing_wave() {
        // -u'' - u = delta, u = (i/2) e^{i|x|}
        let s = Stratified::homogeneous(1.0);
        let mut errs = vec![];
        for h in [1.0 / 32.0, 1.0 / 64.0] {
            let op = crate::discretization::LineOperator::assemble(
                &s,
                -8.0,
                8.0,
                h,
                Complex64::new(1.0, 0.0),
                Side::Plus,
            )
            .unwrap();
            let f = op
                .rhs(&Source::Point {
                    at: 0.0,
                    strength: 1.0,
                })
                .unwrap();
            let u = solve_tridiagonal(&op.matrix, &f).unwrap();
            let err = (0..op.len())
                .map(|i| {
                    let x = op.node(i);
                    (u[i] - Complex64::new(0.0, 0.5) * Complex64::new(0.0, x.abs()).exp()).norm()
                })
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[1] < 2e-3);
        let order = (errs[0] / errs[1]).log2();
        assert!((1.8..=2.2).contains(&order), "{order}");
    }
}
