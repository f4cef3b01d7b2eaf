use serde::{Deserialize, Serialize};

use crate::discretization::{LineOperator, Side};
use crate::error::{Error, Result};
use crate::oracle1d::{exact_solve, Source, Stratified};
use crate::solver::solve_tridiagonal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub lambda: f64,
    pub eta: f64,
    pub h: f64,
    /// Relative nodal `L^2_{-delta}` error of the finite difference solve.
    pub rel_error: f64,
    /// `log2(e(h) / e(h/2))` against the next finer `h`, when present.
    pub order: Option<f64>,
}

/// Compares the Robin-closed finite difference solve on `[-x_max, x_max]`
/// against the exact stratified solution for every `(lambda, eta, h)`.
/// Rows come ordered by `lambda`, then `eta`, then decreasing `h`.
#[allow(clippy::too_many_arguments)]
pub fn oracle_compare(
    stack: &Stratified,
    source: &Source,
    side: Side,
    lambdas: &[f64],
    etas: &[f64],
    hs: &[f64],
    delta: f64,
    x_max: f64,
) -> Result<Vec<OracleRow>> {
    if stack.breakpoints.iter().any(|b| b.abs() >= x_max) {
        return Err(Error::InvalidArgument(
            "stack must lie inside the window".into(),
        ));
    }
    let mut hs = hs.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    let mut rows = Vec::new();
    for &lambda in lambdas {
        for &eta in etas {
            let z = side.z(lambda, eta);
            let exact = exact_solve(stack, z, side, source)?;
            let first = rows.len();
            for &h in &hs {
                let op = LineOperator::assemble(stack, -x_max, x_max, h, z, side)?;
                let u = solve_tridiagonal(&op.matrix, &op.rhs(source)?)?;
                let (mut num, mut den) = (0.0, 0.0);
                for (i, ui) in u.iter().enumerate() {
                    let x = op.node(i);
                    let w = (1.0 + x.abs()).powf(-2.0 * delta);
                    let e = exact.value(x);
                    num += w * (ui - e).norm_sqr();
                    den += w * e.norm_sqr();
                }
                rows.push(OracleRow {
                    lambda,
                    eta,
                    h,
                    rel_error: if den > 0.0 {
                        (num / den).sqrt()
                    } else {
                        num.sqrt()
                    },
                    order: None,
                });
            }
            for i in first..rows.len() - 1 {
                let (a, b) = (rows[i].rel_error, rows[i + 1].rel_error);
                if a > 0.0 && b > 0.0 {
                    rows[i].order = Some((a / b).log2() / (rows[i].h / rows[i + 1].h).log2());
                }
            }
        }
    }
    Ok(rows)
}
