//! Drivers that turn solves into reports: limiting absorption sweeps,
//! radiation bounds, uniqueness probes, eigenvalue scans, bootstrap chains
//! and the one-dimensional oracle comparison.

mod bootstrap;
mod oracle;
mod scan;
mod sweep;
mod uniqueness;

pub use bootstrap::{bootstrap_check, BootstrapChain, ChainLink};
pub use oracle::{oracle_compare, OracleRow};
pub use scan::{eig_scan, ScanFlag, ScanPoint, ScanReport, ScanSettings, SuspectedEigenvalue};
pub use sweep::{
    lap_sweep, radiation_bound_measure, RadiationBound, SweepMeta, SweepReport, SweepRow,
    SweepSettings, SweepVerdict, Verdict,
};
pub use uniqueness::{uniqueness_probe, UniquenessOutcome, UniquenessSettings, UniquenessVerdict};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretization::{Grid, GridFunction};
use crate::error::{Error, Result};
use crate::medium::MediumProfile;

/// Built-in compactly supported right-hand sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FSpec {
    /// `exp(-|x - c|^2 / (2 w^2))` for `|x - c| < cutoff`, zero beyond.
    GaussianBump {
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default = "one")]
        width: f64,
        #[serde(default = "three")]
        cutoff: f64,
    },
    /// Indicator of `|x| < radius`.
    BallIndicator { radius: f64 },
}

fn one() -> f64 {
    1.0
}

fn three() -> f64 {
    3.0
}

impl Default for FSpec {
    fn default() -> Self {
        FSpec::GaussianBump {
            center: None,
            width: 1.0,
            cutoff: 3.0,
        }
    }
}

impl FSpec {
    pub fn build(&self, grid: &Grid) -> Result<GridFunction> {
        let mut f = match self {
            FSpec::GaussianBump {
                center,
                width,
                cutoff,
            } => {
                let c = center.clone().unwrap_or_else(|| vec![0.0; grid.dim]);
                if c.len() != grid.dim || !(*width > 0.0) || !(*cutoff > 0.0) {
                    return Err(Error::InvalidArgument("malformed Gaussian bump".into()));
                }
                GridFunction::from_fn(grid, |x| {
                    let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                    let v = if d2 < cutoff * cutoff {
                        (-d2 / (2.0 * width * width)).exp()
                    } else {
                        0.0
                    };
                    Complex64::new(v, 0.0)
                })
            }
            FSpec::BallIndicator { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidArgument(
                        "ball radius must be positive".into(),
                    ));
                }
                GridFunction::from_fn(grid, |x| {
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    Complex64::new(if r2 < radius * radius { 1.0 } else { 0.0 }, 0.0)
                })
            }
        };
        f.clear_boundary();
        Ok(f)
    }
}

/// `0.75` without a perturbation, else `min(0.75, 1/2 + epsilon/4)`.
pub fn default_delta(m: &MediumProfile) -> f64 {
    match &m.perturbation {
        None => 0.75,
        Some(p) => 0.75f64.min(0.5 + p.epsilon / 4.0),
    }
}

/// Admissible `delta` for sweeps: `(1/2, 3/2)` without a perturbation
/// (values above 1 only support the radial bound), `(1/2, 1/2 + epsilon/4]`
/// with one.
pub fn check_sweep_delta(m: &MediumProfile, delta: f64) -> Result<()> {
    let hi = match &m.perturbation {
        None => 1.5,
        Some(p) => 0.5 + p.epsilon / 4.0,
    };
    let ok = delta > 0.5
        && match &m.perturbation {
            None => delta < hi,
            Some(_) => delta <= hi + 1e-15,
        };
    if !ok {
        return Err(Error::DeltaOutOfRange { delta, lo: 0.5, hi });
    }
    Ok(())
}

pub(crate) fn fmt_f(v: f64) -> String {
    format!("{v:e}")
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}
