use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fmt_f;
use crate::certificate::CertificateReport;
use crate::discretization::Grid;
use crate::error::{Error, Result};
use crate::medium::{check_assumption47, MediumProfile};
use crate::solver::{eig_probe, random_samples, ProbeCurve, ProbeVerdict, SolveOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSettings {
    pub lambdas: Vec<f64>,
    #[serde(default = "d_etas")]
    pub etas: Vec<f64>,
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_plateau")]
    pub plateau_tol: f64,
    /// Upper end of the interval covered by the virial condition.
    #[serde(default)]
    pub lambda0: f64,
    #[serde(default)]
    pub solve: SolveOptions,
}

// Down to 2^-11: the linear plateau fit carries an O(eta_min^2) bias that
// stays above 1e-3 on a 1 -> 1/128 ladder even without an eigenvalue.
fn d_etas() -> Vec<f64> {
    (0..12).map(|k| 0.5f64.powi(k)).collect()
}
fn d_samples() -> usize {
    4
}
fn d_plateau() -> f64 {
    1e-3
}

impl ScanSettings {
    pub fn new(lambdas: Vec<f64>) -> Self {
        Self {
            lambdas,
            etas: d_etas(),
            samples: d_samples(),
            seed: 0,
            plateau_tol: d_plateau(),
            lambda0: 0.0,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanFlag {
    Clean,
    /// Plateau found where no certificate rules out an eigenvalue.
    Suspected,
    /// Plateau found although a certificate excludes eigenvalues here;
    /// points at a discretization or sponge artifact.
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub plateau: f64,
    pub flag: ScanFlag,
    pub curve: ProbeCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspectedEigenvalue {
    pub lambda: f64,
    pub plateau: f64,
    pub flag: ScanFlag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub points: Vec<ScanPoint>,
    /// Peak of each contiguous run of flagged points.
    pub suspected: Vec<SuspectedEigenvalue>,
    /// `None` when the perturbation has no analytic gradient.
    pub certificate: Option<CertificateReport>,
}

impl ScanReport {
    /// Columns `lambda, eta, sample_id, m, verdict`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["lambda", "eta", "sample_id", "m", "verdict"])
            .map_err(err)?;
        for p in &self.points {
            let verdict = format!("{:?}", p.flag);
            for q in &p.curve.points {
                w.write_record([
                    fmt_f(p.lambda),
                    fmt_f(q.eta),
                    q.sample.to_string(),
                    fmt_f(q.m),
                    verdict.clone(),
                ])
                .map_err(err)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Resolvent probe at every `lambda`, cross-checked against the
/// eigenvalue-absence certificate of the medium.
pub fn eig_scan(
    grid: &Grid,
    medium: &MediumProfile,
    settings: &ScanSettings,
) -> Result<ScanReport> {
    if settings.lambdas.is_empty() || settings.samples == 0 {
        return Err(Error::InvalidArgument(
            "scan needs lambdas and at least one sample".into(),
        ));
    }
    let samples = random_samples(grid, medium, settings.samples, settings.seed)?;
    let certificate = match check_assumption47(medium, settings.lambda0, grid) {
        Ok(r) => Some(r),
        Err(Error::NotDifferentiable) => None,
        Err(e) => return Err(e),
    };
    let passes = |name: &str| {
        certificate
            .as_ref()
            .and_then(|c| c.entry(name))
            .is_some_and(|c| c.pass)
    };
    let (radial, virial) = (passes("radial_monotonicity"), passes("virial_bound"));
    let mut lambdas = settings.lambdas.clone();
    lambdas.sort_by(f64::total_cmp);
    let curves: Vec<Result<ProbeCurve>> = lambdas
        .par_iter()
        .map(|&l| {
            eig_probe(
                grid,
                medium,
                l,
                &samples,
                &settings.etas,
                &settings.solve,
                settings.plateau_tol,
            )
        })
        .collect();
    let mut points = Vec::with_capacity(curves.len());
    for (c, &lambda) in curves.into_iter().zip(&lambdas) {
        let curve = c?;
        let flag = match curve.verdict {
            ProbeVerdict::Clean => ScanFlag::Clean,
            ProbeVerdict::EigenvalueLikely if radial || (virial && lambda <= settings.lambda0) => {
                ScanFlag::Contradiction
            }
            ProbeVerdict::EigenvalueLikely => ScanFlag::Suspected,
        };
        points.push(ScanPoint {
            lambda,
            plateau: curve.plateau,
            flag,
            curve,
        });
    }
    let mut suspected: Vec<SuspectedEigenvalue> = Vec::new();
    let mut in_run = false;
    for p in &points {
        if p.flag == ScanFlag::Clean {
            in_run = false;
            continue;
        }
        match suspected.last_mut() {
            Some(s) if in_run => {
                if p.plateau > s.plateau {
                    *s = SuspectedEigenvalue {
                        lambda: p.lambda,
                        plateau: p.plateau,
                        flag: p.flag,
                    };
                }
            }
            _ => suspected.push(SuspectedEigenvalue {
                lambda: p.lambda,
                plateau: p.plateau,
                flag: p.flag,
            }),
        }
        in_run = true;
    }
    Ok(ScanReport {
        points,
        suspected,
        certificate,
    })
}
