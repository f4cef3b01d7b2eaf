use serde::{Deserialize, Serialize};

use super::identity::{FieldSource, GridInterp};
use super::quadrature::sphere_rule;
use crate::discretization::GridFunction;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxRow {
    pub radius: f64,
    pub flux: f64,
    /// Minimum of the fluxes up to and including this radius.
    pub running_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxReport {
    pub rows: Vec<FluxRow>,
    /// Least-squares slope of the flux against the radius.
    pub slope: f64,
}

impl FluxReport {
    pub fn min(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.running_min)
    }
}

/// `F(R) = R^a int_{S_R} (|du/dr|^2 + |u|^2) dS` for each radius, with the
/// exponent `a` supplied by the caller (0 for `N >= 3`).
pub fn flux_probe(u: &GridFunction, radii: &[f64], exponent: f64) -> Result<FluxReport> {
    let g = &u.grid;
    let reach = radii.iter().copied().fold(0.0, f64::max);
    let src = GridInterp::new(u, reach)?;
    let dim = g.dim;
    let mut axis = vec![0.0; dim];
    axis[dim - 1] = 1.0;
    let mut rows = Vec::with_capacity(radii.len());
    let mut running = f64::INFINITY;
    for &radius in radii {
        let pts = sphere_rule(dim, radius, g.h, &axis, &[]);
        let mut f = 0.0;
        for q in &pts {
            let s = src.sample(&q.x);
            let dr: num_complex::Complex64 = (0..dim).map(|j| s.grad[j] * (q.x[j] / radius)).sum();
            f += q.w * (dr.norm_sqr() + s.u.norm_sqr());
        }
        let flux = f * radius.powf(exponent);
        running = running.min(flux);
        rows.push(FluxRow {
            radius,
            flux,
            running_min: running,
        });
    }
    let n = rows.len() as f64;
    let slope = if rows.len() < 2 {
        0.0
    } else {
        let mx = rows.iter().map(|r| r.radius).sum::<f64>() / n;
        let my = rows.iter().map(|r| r.flux).sum::<f64>() / n;
        let sxy: f64 = rows.iter().map(|r| (r.radius - mx) * (r.flux - my)).sum();
        let sxx: f64 = rows.iter().map(|r| (r.radius - mx).powi(2)).sum();
        sxy / sxx
    };
    Ok(FluxReport { rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::build_grid;
    use num_complex::Complex64;

    #[test]
    fn compact_support_has_no_flux() {
        let g = build_grid(3, 6.0, 0.25, None).unwrap();
        let u = GridFunction::from_fn(&g, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new(if r2 < 0.8 { 1.0 - r2 } else { 0.0 }, 0.0)
        });
        let rep = flux_probe(&u, &[2.0, 3.0, 4.0], 0.0).unwrap();
        assert!(rep.rows.iter().all(|r| r.flux == 0.0));
    }

    #[test]
    fn outgoing_wave_flux() {
        let g = build_grid(3, 6.0, 0.0625, None).unwrap();
        let u = GridFunction::from_fn(&g, |x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
            Complex64::new(0.0, r).exp() / r
        });
        let radii = [2.0, 3.0, 4.0, 5.0];
        let rep = flux_probe(&u, &radii, 0.0).unwrap();
        for row in &rep.rows {
            let exact = 4.0 * std::f64::consts::PI * (2.0 + 1.0 / (row.radius * row.radius));
            assert!(
                (row.flux - exact).abs() < 0.01 * exact,
                "{row:?} vs {exact}"
            );
        }
    }
}
