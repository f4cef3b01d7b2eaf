//! Resolvent probe `m(eta) = eta ||(H_h - lambda - i eta)^{-1} f||_X` for
//! unit-norm samples `f`. A plateau as `eta` decreases betrays an
//! eigenvalue at `lambda`; linear decay means the resolvent stays bounded.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{PreparedSolver, SolveOptions};
use crate::discretization::{assemble, Grid, GridFunction, Side};
use crate::error::{Error, Result};
use crate::medium::MediumProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeVerdict {
    EigenvalueLikely,
    Clean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub eta: f64,
    pub sample: usize,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeCurve {
    pub lambda: f64,
    pub points: Vec<ProbePoint>,
    /// Intercept `c0` of the fit `m = c0 + c1 eta` on the last three rungs,
    /// per sample.
    pub intercepts: Vec<f64>,
    /// Largest `c0 / max m` over the samples.
    pub plateau: f64,
    pub verdict: ProbeVerdict,
}

/// `count` random fields of unit `X` norm vanishing on the outer faces.
pub fn random_samples(
    grid: &Grid,
    medium: &MediumProfile,
    count: usize,
    seed: u64,
) -> Result<Vec<GridFunction>> {
    let mu = medium.mu_nodes(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let mut f = GridFunction::zeros(grid);
            for (i, v) in f.values.iter_mut().enumerate() {
                let re: f64 = rng.gen_range(-1.0..1.0);
                let im: f64 = rng.gen_range(-1.0..1.0);
                if !grid.is_boundary(i) {
                    *v = Complex64::new(re, im);
                }
            }
            let n = x_norm(&f.values, &mu, grid.cell_volume());
            f.values.iter_mut().for_each(|v| *v /= n);
            f
        })
        .collect())
}

pub(crate) fn x_norm(u: &[Complex64], mu: &[f64], w: f64) -> f64 {
    (u.iter().zip(mu).map(|(a, m)| a.norm_sqr() * m).sum::<f64>() * w).sqrt()
}

/// Least-squares line through the points; returns `(c0, c1)`.
pub(crate) fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let c1 = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - c1 * mx, c1)
}

/// Probes `lambda` along the decreasing ladder `eta_list`.
pub fn eig_probe(
    grid: &Grid,
    medium: &MediumProfile,
    lambda: f64,
    f_samples: &[GridFunction],
    eta_list: &[f64],
    opts: &SolveOptions,
    plateau_tol: f64,
) -> Result<ProbeCurve> {
    if eta_list.len() < 3
        || eta_list.windows(2).any(|w| w[1] >= w[0])
        || eta_list.iter().any(|&e| !(e > 0.0))
    {
        return Err(Error::InvalidArgument(
            "eta list must hold at least three decreasing positive values".into(),
        ));
    }
    if f_samples.is_empty() {
        return Err(Error::InvalidArgument("no probe samples".into()));
    }
    let mut points = Vec::with_capacity(eta_list.len() * f_samples.len());
    let mut mu = Vec::new();
    for &eta in eta_list {
        let op = assemble(grid, medium, Side::Plus.z(lambda, eta), Side::Plus)?;
        if mu.is_empty() {
            mu = op.mu.clone();
        }
        let solver = PreparedSolver::new(&op, opts)?;
        for (s, f) in f_samples.iter().enumerate() {
            let (u, _) = solver.solve(f)?;
            let w = grid.cell_volume();
            let m = eta * x_norm(&u.values, &mu, w) / x_norm(&f.values, &mu, w);
            points.push(ProbePoint { eta, sample: s, m });
        }
    }
    let mut intercepts = Vec::with_capacity(f_samples.len());
    let mut plateau: f64 = 0.0;
    for s in 0..f_samples.len() {
        let curve: Vec<&ProbePoint> = points.iter().filter(|p| p.sample == s).collect();
        let tail = &curve[curve.len() - 3..];
        let xs: Vec<f64> = tail.iter().map(|p| p.eta).collect();
        let ys: Vec<f64> = tail.iter().map(|p| p.m).collect();
        let (c0, _) = line_fit(&xs, &ys);
        let peak = curve.iter().map(|p| p.m).fold(0.0, f64::max);
        intercepts.push(c0);
        if peak > 0.0 {
            plateau = plateau.max(c0 / peak);
        }
    }
    let verdict = if plateau > plateau_tol {
        ProbeVerdict::EigenvalueLikely
    } else {
        ProbeVerdict::Clean
    };
    Ok(ProbeCurve {
        lambda,
        points,
        intercepts,
        plateau,
        verdict,
    })
}
