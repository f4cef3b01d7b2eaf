use serde::{Deserialize, Serialize};

use crate::certificate::CertificateReport;
use crate::discretization::{laplacian_h, GridFunction};
use crate::error::{Error, Result};
use crate::geometry::validate_assumption21;
use crate::medium::MediumProfile;
use crate::weighted_analysis::{flux_probe, FluxReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniquenessSettings {
    pub lambda: f64,
    /// Radii of the flux spheres.
    pub radii: Vec<f64>,
    /// Flux exponent; 0 for `N >= 3`.
    #[serde(default)]
    pub exponent: f64,
    /// Relative residual allowed for `(-mu_0^{-1} Delta_h - lambda) u = 0`.
    #[serde(default = "d_hom")]
    pub hom_tol: f64,
    /// Nodes with `|x| <= exclude_radius` are left out of the residual.
    #[serde(default)]
    pub exclude_radius: f64,
    /// Flux threshold relative to `1 + ||u||^2`.
    #[serde(default = "d_flux")]
    pub flux_tol: f64,
}

fn d_hom() -> f64 {
    1e-6
}
fn d_flux() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UniquenessOutcome {
    /// Homogeneous, flux decays and the partition hypotheses hold, so the
    /// field must vanish.
    TrivialByFluxDecay,
    NoConclusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessVerdict {
    pub outcome: UniquenessOutcome,
    pub residual: f64,
    pub norm_u: f64,
    pub flux: FluxReport,
    pub certificate: CertificateReport,
}

/// Tests a candidate solution of the homogeneous problem for the flux
/// criterion that forces it to vanish. Fails with `NotHomogeneous` when
/// the candidate does not solve the homogeneous equation on the
/// sponge-free ball outside `exclude_radius`.
pub fn uniqueness_probe(
    u: &GridFunction,
    medium: &MediumProfile,
    s: &UniquenessSettings,
) -> Result<UniquenessVerdict> {
    let g = &u.grid;
    if medium.dim() != g.dim {
        return Err(Error::ShapeMismatch {
            expected: g.dim,
            found: medium.dim(),
        });
    }
    if s.radii.is_empty() || !(s.lambda > 0.0) {
        return Err(Error::InvalidArgument(
            "uniqueness probe needs radii and lambda > 0".into(),
        ));
    }
    let mu = medium.mu0_nodes(g);
    let lap = laplacian_h(g, &u.values);
    let rphys = g.physical_radius();
    let (mut res, mut nrm) = (0.0, 0.0);
    for i in 0..u.values.len() {
        let r = g.radius(i);
        if g.is_boundary(i) || r <= s.exclude_radius || r >= rphys {
            continue;
        }
        res += (-lap[i] / mu[i] - s.lambda * u.values[i]).norm_sqr();
        nrm += u.values[i].norm_sqr();
    }
    let residual = if nrm > 0.0 { (res / nrm).sqrt() } else { 0.0 };
    if residual > s.hom_tol {
        return Err(Error::NotHomogeneous {
            residual,
            tol: s.hom_tol,
        });
    }
    let norm_u = (nrm * g.cell_volume()).sqrt();
    let flux = flux_probe(u, &s.radii, s.exponent)?;
    let certificate = validate_assumption21(&medium.partition, &medium.nus, rphys)?;
    let decays = flux.min() <= s.flux_tol * (1.0 + norm_u * norm_u) && flux.slope <= 0.0;
    let outcome = if decays && certificate.pass {
        UniquenessOutcome::TrivialByFluxDecay
    } else {
        UniquenessOutcome::NoConclusion
    };
    Ok(UniquenessVerdict {
        outcome,
        residual,
        norm_u,
        flux,
        certificate,
    })
}
