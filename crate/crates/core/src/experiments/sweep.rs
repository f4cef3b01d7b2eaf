use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_sweep_delta, fmt_f, fmt_opt, FSpec};
use crate::discretization::{assemble, Grid, GridFunction, Region, Side, Sponge};
use crate::error::{Error, Result};
use crate::medium::MediumProfile;
use crate::solver::{PreparedSolver, SolveOptions};
use crate::weighted_analysis::{
    node_gradient, radiation_field, star_sum, wavenumber_on_side, weighted_sum, RadiationField,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    pub lambdas: Vec<f64>,
    #[serde(default = "d_eta0")]
    pub eta0: f64,
    #[serde(default = "d_factor")]
    pub factor: f64,
    #[serde(default = "d_count")]
    pub count: usize,
    #[serde(default = "d_sides")]
    pub sides: Vec<Side>,
    /// Defaults by medium, see [`super::default_delta`].
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub f_spec: FSpec,
    #[serde(default = "d_cauchy")]
    pub cauchy_ratio_max: f64,
    #[serde(default = "d_band")]
    pub radiation_band: f64,
    #[serde(default = "d_exterior")]
    pub exterior_radii: Vec<f64>,
    #[serde(default)]
    pub solve: SolveOptions,
}

fn d_eta0() -> f64 {
    1.0
}
fn d_factor() -> f64 {
    2.0
}
fn d_count() -> usize {
    8
}
fn d_sides() -> Vec<Side> {
    vec![Side::Plus]
}
fn d_cauchy() -> f64 {
    0.75
}
fn d_band() -> f64 {
    2.0
}
fn d_exterior() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}

impl SweepSettings {
    pub fn new(lambdas: Vec<f64>) -> Self {
        Self {
            lambdas,
            eta0: d_eta0(),
            factor: d_factor(),
            count: d_count(),
            sides: d_sides(),
            delta: None,
            f_spec: FSpec::default(),
            cauchy_ratio_max: d_cauchy(),
            radiation_band: d_band(),
            exterior_radii: d_exterior(),
            solve: SolveOptions::default(),
        }
    }

    /// `eta_k = eta0 factor^{-k}`, `k = 0..count`.
    pub fn etas(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.eta0 * self.factor.powi(-(k as i32)))
            .collect()
    }

    fn check(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.lambdas.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidArgument(
                "lambda list must hold positive values".into(),
            ));
        }
        if !(self.eta0 > 0.0) || !(self.factor > 1.0) || self.count < 2 {
            return Err(Error::InvalidArgument(
                "eta ladder needs eta0 > 0, factor > 1, count >= 2".into(),
            ));
        }
        if self.sides.is_empty() {
            return Err(Error::InvalidArgument("no limit side requested".into()));
        }
        self.solve.check()
    }
}

/// Everything measured for one `(lambda, side, eta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub side: Side,
    pub eta: f64,
    /// `||u||_{-delta}` on the sponge-free ball.
    pub norm_u: f64,
    /// `||f||_{delta}`.
    pub norm_f: f64,
    /// `||D u||_{delta-1}`.
    pub norm_du: f64,
    /// `||D u||_{delta-1,*}`.
    pub norm_du_star: f64,
    /// `||D_r u||_{delta-1}`.
    pub norm_dr: f64,
    /// `||D u||_{delta-1} / ||f||_delta`.
    pub ratio: f64,
    /// `||D u||_{delta-1,*} / (||f||_delta + ||u||_{-delta})`.
    pub ratio_star: f64,
    /// `||D_r u||_{delta-1} / ||f||_delta`.
    pub ratio_dr: f64,
    /// Exterior energy `int_{E_s} (1+r)^{-2 delta} (|grad u|^2 + |k|^2 |u|^2)`
    /// over `(1+s)^{-(2 delta - 1)} ||f||_delta^2`, one per exterior radius.
    pub exterior: Vec<f64>,
    /// `||u_eta - u_{previous eta}||_{-delta}`.
    pub cauchy: Option<f64>,
    /// `eta ||u||_X^2`.
    pub eta_u_sq: f64,
    /// `-sgn Im <f, u>_X`; equals `eta_u_sq` without a sponge.
    pub im_fu: f64,
    pub iterations: usize,
    pub residual: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    LAPConverged,
    EigenvalueSuspected,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepVerdict {
    pub lambda: f64,
    pub side: Side,
    pub verdict: Verdict,
    /// Successive quotients of the Cauchy differences.
    pub cauchy_ratios: Vec<f64>,
    /// Largest deviation factor of the radiation ratio from its median.
    pub radiation_spread: f64,
    /// Slope of `log ||u||_{-delta}` against `log eta` on the last three rungs.
    pub growth_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub dim: usize,
    pub rmax: f64,
    pub h: f64,
    pub sponge: Option<Sponge>,
    pub norm_radius: f64,
    pub delta: f64,
    pub lambdas: Vec<f64>,
    pub etas: Vec<f64>,
    pub sides: Vec<Side>,
    pub exterior_radii: Vec<f64>,
    pub nus: Vec<f64>,
    pub perturbed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub meta: SweepMeta,
    pub rows: Vec<SweepRow>,
    pub verdicts: Vec<SweepVerdict>,
}

const CSV_HEAD: [&str; 17] = [
    "lambda",
    "side",
    "eta",
    "norm_u",
    "norm_f",
    "norm_du",
    "norm_du_star",
    "norm_dr",
    "ratio",
    "ratio_star",
    "ratio_dr",
    "cauchy",
    "eta_u_sq",
    "im_fu",
    "iterations",
    "residual",
    "error",
];

impl SweepReport {
    /// One row per record in the stored order. The exterior values follow
    /// as `ext_<s>` columns.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut head: Vec<String> = CSV_HEAD.iter().map(|s| s.to_string()).collect();
        head.extend(self.meta.exterior_radii.iter().map(|s| format!("ext_{s}")));
        w.write_record(&head).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![
                fmt_f(r.lambda),
                r.side.symbol().to_string(),
                fmt_f(r.eta),
                fmt_f(r.norm_u),
                fmt_f(r.norm_f),
                fmt_f(r.norm_du),
                fmt_f(r.norm_du_star),
                fmt_f(r.norm_dr),
                fmt_f(r.ratio),
                fmt_f(r.ratio_star),
                fmt_f(r.ratio_dr),
                fmt_opt(r.cauchy),
                fmt_f(r.eta_u_sq),
                fmt_f(r.im_fu),
                r.iterations.to_string(),
                fmt_f(r.residual),
                r.error.clone().unwrap_or_default(),
            ];
            rec.extend(r.exterior.iter().map(|&v| fmt_f(v)));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn verdict(&self, lambda: f64, side: Side) -> Option<&SweepVerdict> {
        self.verdicts
            .iter()
            .find(|v| v.lambda == lambda && v.side == side)
    }

    pub fn rows_for(&self, lambda: f64, side: Side) -> impl Iterator<Item = &SweepRow> {
        self.rows
            .iter()
            .filter(move |r| r.lambda == lambda && r.side == side)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

struct RowInputs<'a> {
    grid: &'a Grid,
    medium: &'a MediumProfile,
    f: &'a GridFunction,
    delta: f64,
    region: Region,
    exterior_radii: &'a [f64],
    opts: &'a SolveOptions,
}

fn solve_row(
    inp: &RowInputs,
    lambda: f64,
    side: Side,
    eta: f64,
) -> Result<(SweepRow, GridFunction)> {
    let g = inp.grid;
    let z = side.z(lambda, eta);
    let op = assemble(g, inp.medium, z, side)?;
    let solver = PreparedSolver::new(&op, inp.opts)?;
    let (u, stats) = solver.solve(inp.f)?;
    let delta = inp.delta;
    let region = inp.region;
    let norm_u = weighted_sum(g, -delta, region, |i| u.values[i].norm_sqr()).sqrt();
    let norm_f = weighted_sum(g, delta, Region::All, |i| inp.f.values[i].norm_sqr()).sqrt();
    let kf = wavenumber_on_side(z, inp.medium, g, side);
    // k already carries the side (Re k < 0 below the axis), so the plain
    // -i k form is the outgoing field for `+` and the incoming one for `-`.
    let RadiationField { du, dru, .. } = radiation_field(&u, &kf, Side::Plus);
    let du_sq = |i: usize| du.iter().map(|c| c[i].norm_sqr()).sum::<f64>();
    let norm_du = weighted_sum(g, delta - 1.0, region, du_sq).sqrt();
    let norm_du_star = star_sum(g, delta - 1.0, region, du_sq).sqrt();
    let norm_dr = weighted_sum(g, delta - 1.0, region, |i| dru[i].norm_sqr()).sqrt();
    let safe = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    let energy = |i: usize| {
        let mut grad = [Complex64::new(0.0, 0.0); 3];
        node_gradient(g, &u.values, i, &mut grad[..g.dim]);
        grad[..g.dim].iter().map(|c| c.norm_sqr()).sum::<f64>()
            + kf.k[i].norm_sqr() * u.values[i].norm_sqr()
    };
    let rphys = g.physical_radius();
    let exterior = inp
        .exterior_radii
        .iter()
        .map(|&s| {
            let e = weighted_sum(
                g,
                -delta,
                Region::Shell {
                    inner: s,
                    outer: rphys,
                },
                energy,
            );
            safe(e, (1.0 + s).powf(-(2.0 * delta - 1.0)) * norm_f * norm_f)
        })
        .collect();
    let w = g.cell_volume();
    let u_x_sq: f64 = u
        .values
        .iter()
        .zip(&op.mu)
        .map(|(a, m)| a.norm_sqr() * m)
        .sum::<f64>()
        * w;
    let fu: Complex64 = inp
        .f
        .values
        .iter()
        .zip(&u.values)
        .zip(&op.mu)
        .map(|((a, b), m)| a * b.conj() * *m)
        .sum::<Complex64>()
        * w;
    Ok((
        SweepRow {
            lambda,
            side,
            eta,
            norm_u,
            norm_f,
            norm_du,
            norm_du_star,
            norm_dr,
            ratio: safe(norm_du, norm_f),
            ratio_star: safe(norm_du_star, norm_f + norm_u),
            ratio_dr: safe(norm_dr, norm_f),
            exterior,
            cauchy: None,
            eta_u_sq: eta * u_x_sq,
            im_fu: -side.sign() * fu.im,
            iterations: stats.iterations,
            residual: stats.residual,
            error: None,
        },
        u,
    ))
}

fn failed_row(lambda: f64, side: Side, eta: f64, n_ext: usize, e: &Error) -> SweepRow {
    SweepRow {
        lambda,
        side,
        eta,
        norm_u: 0.0,
        norm_f: 0.0,
        norm_du: 0.0,
        norm_du_star: 0.0,
        norm_dr: 0.0,
        ratio: 0.0,
        ratio_star: 0.0,
        ratio_dr: 0.0,
        exterior: vec![0.0; n_ext],
        cauchy: None,
        eta_u_sq: 0.0,
        im_fu: 0.0,
        iterations: 0,
        residual: 0.0,
        error: Some(e.to_string()),
    }
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn judge(rows: &[SweepRow], dim: usize, settings: &SweepSettings) -> SweepVerdict {
    let (lambda, side) = (rows[0].lambda, rows[0].side);
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    let diffs: Vec<f64> = ok.iter().filter_map(|r| r.cauchy).collect();
    let cauchy_ratios: Vec<f64> = diffs
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let radiation: Vec<f64> = ok
        .iter()
        .map(|r| if dim == 2 { r.ratio_star } else { r.ratio })
        .collect();
    let med = median(&radiation);
    let radiation_spread = radiation
        .iter()
        .map(|&v| {
            if v > 0.0 && med > 0.0 {
                (v / med).max(med / v)
            } else {
                f64::INFINITY
            }
        })
        .fold(1.0, f64::max);
    let tail = &ok[ok.len().saturating_sub(3)..];
    let xs: Vec<f64> = tail.iter().map(|r| r.eta.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.norm_u.max(1e-300).ln()).collect();
    let growth_slope = if tail.len() >= 2 {
        crate::solver::probe::line_fit(&xs, &ys).1
    } else {
        0.0
    };
    let complete = ok.len() == rows.len();
    let converged = complete
        && cauchy_ratios.len() >= 3
        && cauchy_ratios[cauchy_ratios.len() - 3..]
            .iter()
            .all(|&q| q <= settings.cauchy_ratio_max)
        && radiation_spread <= settings.radiation_band;
    let verdict = if converged {
        Verdict::LAPConverged
    } else if tail.len() == 3 && growth_slope <= -0.8 {
        Verdict::EigenvalueSuspected
    } else {
        Verdict::Inconclusive
    };
    SweepVerdict {
        lambda,
        side,
        verdict,
        cauchy_ratios,
        radiation_spread,
        growth_slope,
    }
}

/// Solves along the `eta` ladder for every `(lambda, side)` and records the
/// weighted norms. Norms of `u` and its radiation field are taken on the
/// ball free of the sponge. A failing solve is recorded in its row and the
/// sweep continues.
pub fn lap_sweep(
    grid: &Grid,
    medium: &MediumProfile,
    settings: &SweepSettings,
) -> Result<SweepReport> {
    settings.check()?;
    if medium.dim() != grid.dim {
        return Err(Error::ShapeMismatch {
            expected: grid.dim,
            found: medium.dim(),
        });
    }
    let delta = settings
        .delta
        .unwrap_or_else(|| super::default_delta(medium));
    check_sweep_delta(medium, delta)?;
    let f = settings.f_spec.build(grid)?;
    let etas = settings.etas();
    let inputs = RowInputs {
        grid,
        medium,
        f: &f,
        delta,
        region: Region::Ball {
            radius: grid.physical_radius(),
        },
        exterior_radii: &settings.exterior_radii,
        opts: &settings.solve,
    };
    let mut keys: Vec<(f64, Side)> = settings
        .lambdas
        .iter()
        .flat_map(|&l| settings.sides.iter().map(move |&s| (l, s)))
        .collect();
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keys.dedup();
    let groups: Vec<Vec<SweepRow>> = keys
        .par_iter()
        .map(|&(lambda, side)| {
            let mut rows = Vec::with_capacity(etas.len());
            let mut prev: Option<GridFunction> = None;
            for &eta in &etas {
                match solve_row(&inputs, lambda, side, eta) {
                    Ok((mut row, u)) => {
                        if let Some(p) = &prev {
                            row.cauchy = Some(
                                weighted_sum(grid, -delta, inputs.region, |i| {
                                    (u.values[i] - p.values[i]).norm_sqr()
                                })
                                .sqrt(),
                            );
                        }
                        rows.push(row);
                        prev = Some(u);
                    }
                    Err(e) => {
                        rows.push(failed_row(
                            lambda,
                            side,
                            eta,
                            settings.exterior_radii.len(),
                            &e,
                        ));
                        prev = None;
                    }
                }
            }
            rows
        })
        .collect();
    let verdicts = groups
        .iter()
        .map(|g| judge(g, grid.dim, settings))
        .collect();
    Ok(SweepReport {
        meta: SweepMeta {
            dim: grid.dim,
            rmax: grid.rmax,
            h: grid.h,
            sponge: grid.sponge.clone(),
            norm_radius: grid.physical_radius(),
            delta,
            lambdas: settings.lambdas.clone(),
            etas,
            sides: settings.sides.clone(),
            exterior_radii: settings.exterior_radii.clone(),
            nus: medium.nus.clone(),
            perturbed: medium.perturbation.is_some(),
        },
        rows: groups.into_iter().flatten().collect(),
        verdicts,
    })
}

/// Empirical radiation constants per `(lambda, side)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiationBound {
    pub lambda: f64,
    pub side: Side,
    /// `max_eta ||D u||_{delta-1} / ||f||_delta`.
    pub c_full: f64,
    /// `max_eta ||D u||_{delta-1,*} / (||f||_delta + ||u||_{-delta})`.
    pub c_star: f64,
    /// `max_eta ||D_r u||_{delta-1} / ||f||_delta`.
    pub c_radial: f64,
    /// Max over min of the primary ratio (the starred one for `N = 2`).
    pub variation: f64,
    /// Primary ratio above ten times its median somewhere.
    pub unbounded: bool,
}

pub fn radiation_bound_measure(report: &SweepReport) -> Vec<RadiationBound> {
    report
        .verdicts
        .iter()
        .map(|v| {
            let rows: Vec<&SweepRow> = report
                .rows_for(v.lambda, v.side)
                .filter(|r| r.error.is_none())
                .collect();
            let max = |f: &dyn Fn(&SweepRow) -> f64| rows.iter().map(|r| f(r)).fold(0.0, f64::max);
            let primary: Vec<f64> = rows
                .iter()
                .map(|r| {
                    if report.meta.dim == 2 {
                        r.ratio_star
                    } else {
                        r.ratio
                    }
                })
                .collect();
            let pmax = primary.iter().copied().fold(0.0, f64::max);
            let pmin = primary.iter().copied().fold(f64::INFINITY, f64::min);
            let med = median(&primary);
            RadiationBound {
                lambda: v.lambda,
                side: v.side,
                c_full: max(&|r| r.ratio),
                c_star: max(&|r| r.ratio_star),
                c_radial: max(&|r| r.ratio_dr),
                variation: if pmin > 0.0 {
                    pmax / pmin
                } else if pmax > 0.0 {
                    f64::INFINITY
                } else {
                    1.0
                },
                unbounded: pmax > 10.0 * med,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::build_grid;
    use crate::solver::Method;

    #[test]
    fn zero_source_gives_zero_rows() {
        let g = build_grid(2, 4.0, 0.25, None).unwrap();
        let m = MediumProfile::homogeneous(2, 1.0).unwrap();
        let mut s = SweepSettings::new(vec![1.0]);
        s.count = 3;
        s.f_spec = FSpec::GaussianBump {
            center: Some(vec![0.1, 0.1]),
            width: 1.0,
            cutoff: 0.01,
        };
        s.solve = SolveOptions::with_method(Method::BandedDirect);
        let rep = lap_sweep(&g, &m, &s).unwrap();
        assert_eq!(rep.rows.len(), 3);
        for r in &rep.rows {
            assert_eq!(r.norm_u, 0.0);
            assert_eq!(r.ratio, 0.0);
        }
        let b = radiation_bound_measure(&rep);
        assert_eq!(b[0].c_full, 0.0);
    }

    #[test]
    fn side_symmetry_and_balance() {
        let g = build_grid(2, 4.0, 0.25, None).unwrap();
        let m = MediumProfile::homogeneous(2, 1.0).unwrap();
        let mut s = SweepSettings::new(vec![1.5]);
        s.count = 3;
        s.sides = vec![Side::Minus, Side::Plus];
        s.solve = SolveOptions::with_method(Method::BandedDirect);
        let rep = lap_sweep(&g, &m, &s).unwrap();
        assert_eq!(rep.rows.len(), 6);
        assert_eq!(rep.rows[0].side, Side::Plus);
        for (p, q) in rep.rows[..3].iter().zip(&rep.rows[3..]) {
            assert!((p.norm_u - q.norm_u).abs() <= 1e-10 * p.norm_u);
            assert!((p.norm_du - q.norm_du).abs() <= 1e-9 * p.norm_du);
        }
        for r in &rep.rows {
            assert!((r.eta_u_sq - r.im_fu).abs() <= 1e-8 * r.eta_u_sq, "{r:?}");
        }
    }
}
