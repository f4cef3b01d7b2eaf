//! Product rules on spheres, shells and interface patches. Angular and
//! radial panels are split where the integrand jumps, so every panel sees
//! a single layer.

use std::f64::consts::PI;

use crate::geometry::{complement_basis, Family, LayeredPartition, Locus};

/// `c_N = (N - 1)(N - 3) / 4`.
pub fn c_n(dim: usize) -> f64 {
    let n = dim as f64;
    (n - 1.0) * (n - 3.0) / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub x: [f64; 3],
    pub w: f64,
}

const GAUSS2: f64 = 0.577_350_269_189_625_8;

/// Two-point Gauss panels of length at most `step` on `[a, b]`.
pub(crate) fn panels(a: f64, b: f64, step: f64) -> Vec<(f64, f64)> {
    if !(b > a) {
        return vec![];
    }
    let m = ((b - a) / step).ceil().max(1.0) as usize;
    let len = (b - a) / m as f64;
    let mut out = Vec::with_capacity(2 * m);
    for p in 0..m {
        let mid = a + (p as f64 + 0.5) * len;
        for s in [-GAUSS2, GAUSS2] {
            out.push((mid + 0.5 * len * s, 0.5 * len));
        }
    }
    out
}

/// Split points of a sorted list, keeping those strictly inside `(a, b)`.
fn segments(a: f64, b: f64, cuts: &[f64]) -> Vec<(f64, f64)> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.sort_by(f64::total_cmp);
    pts.extend(inner);
    pts.push(b);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn ring_count(length: f64, h: f64) -> usize {
    ((length / h).ceil() as usize).max(8)
}

/// Polar axis of the partition together with the angular breakpoints the
/// interfaces cut into the sphere of radius `rho`, and the radii at which
/// interfaces coincide with spheres.
pub(crate) struct Cuts {
    pub axis: Vec<f64>,
    pub angles_at: Box<dyn Fn(f64) -> Vec<f64> + Sync>,
    pub radii: Vec<f64>,
}

pub(crate) fn cuts_for(p: &LayeredPartition) -> Cuts {
    let dim = p.dim;
    let mut e_n = vec![0.0; dim];
    e_n[dim - 1] = 1.0;
    let offsets: Vec<f64> = p
        .interfaces()
        .iter()
        .map(|i| match &i.locus {
            Locus::Plane { offset, .. } => *offset,
            Locus::Cylinder { radius } => *radius,
            Locus::Cone { half_angle } => *half_angle,
        })
        .collect();
    match &p.family {
        Family::PlanarStack { axis } => Cuts {
            axis: axis.clone(),
            angles_at: Box::new(move |rho| {
                offsets
                    .iter()
                    .filter(|b| b.abs() < rho)
                    .map(|b| (b / rho).acos())
                    .collect()
            }),
            radii: vec![],
        },
        Family::ConcentricCylinders if dim == 2 => Cuts {
            axis: e_n,
            angles_at: Box::new(|_| vec![]),
            radii: offsets,
        },
        Family::ConcentricCylinders => Cuts {
            axis: e_n,
            angles_at: Box::new(move |rho| {
                offsets
                    .iter()
                    .filter(|&&b| b < rho)
                    .flat_map(|b| {
                        let t = (b / rho).asin();
                        [t, PI - t]
                    })
                    .collect()
            }),
            radii: vec![],
        },
        Family::Cone { .. } => Cuts {
            axis: e_n,
            angles_at: Box::new(move |_| offsets.clone()),
            radii: vec![],
        },
    }
}

/// Rule for `int_{S_rho} g dS` with points spaced about `h` apart; `cuts`
/// are polar angles (from `axis`) where the integrand may jump.
pub(crate) fn sphere_rule(
    dim: usize,
    rho: f64,
    h: f64,
    axis: &[f64],
    cuts: &[f64],
) -> Vec<QuadPoint> {
    let basis = complement_basis(axis);
    let mut out = Vec::new();
    let mut push = |dir: [f64; 3], w: f64| {
        let mut x = [0.0; 3];
        for j in 0..dim {
            x[j] = rho * dir[j];
        }
        out.push(QuadPoint { x, w });
    };
    if dim == 2 {
        let mut signed: Vec<f64> = cuts.iter().flat_map(|&c| [c, -c]).collect();
        signed.push(0.0);
        for (a, b) in segments(-PI, PI, &signed) {
            for (psi, w) in panels(a, b, h / rho) {
                let (s, c) = psi.sin_cos();
                let mut d = [0.0; 3];
                for j in 0..2 {
                    d[j] = c * axis[j] + s * basis[0][j];
                }
                push(d, rho * w);
            }
        }
    } else {
        for (a, b) in segments(0.0, PI, cuts) {
            for (theta, w) in panels(a, b, h / rho) {
                let (st, ct) = theta.sin_cos();
                let m = ring_count(2.0 * PI * rho * st, h);
                let dphi = 2.0 * PI / m as f64;
                for q in 0..m {
                    let (sp, cp) = (q as f64 * dphi).sin_cos();
                    let mut d = [0.0; 3];
                    for j in 0..3 {
                        d[j] = ct * axis[j] + st * (cp * basis[0][j] + sp * basis[1][j]);
                    }
                    push(d, rho * rho * st * w * dphi);
                }
            }
        }
    }
    out
}

/// Radial nodes for the shell `r < |x| < R`, split at `kinks`.
pub(crate) fn radial_rule(r: f64, big_r: f64, h: f64, kinks: &[f64]) -> Vec<(f64, f64)> {
    segments(r, big_r, kinks)
        .into_iter()
        .flat_map(|(a, b)| panels(a, b, h))
        .collect()
}

/// Rule for the part of an interface inside `r < |x| < R`.
pub(crate) fn interface_rule(
    dim: usize,
    locus: &Locus,
    r: f64,
    big_r: f64,
    h: f64,
) -> Vec<QuadPoint> {
    let mut out = Vec::new();
    let mk = |v: [f64; 3], w: f64| QuadPoint { x: v, w };
    match locus {
        Locus::Plane { axis, offset } => {
            let b = *offset;
            if b.abs() >= big_r {
                return out;
            }
            let s_lo = (r * r - b * b).max(0.0).sqrt();
            let s_hi = (big_r * big_r - b * b).sqrt();
            let basis = complement_basis(axis);
            if dim == 2 {
                for sgn in [-1.0, 1.0] {
                    for (s, w) in panels(s_lo, s_hi, h) {
                        let mut x = [0.0; 3];
                        for j in 0..2 {
                            x[j] = b * axis[j] + sgn * s * basis[0][j];
                        }
                        out.push(mk(x, w));
                    }
                }
            } else {
                for (s, w) in panels(s_lo, s_hi, h) {
                    let m = ring_count(2.0 * PI * s, h);
                    let dphi = 2.0 * PI / m as f64;
                    for q in 0..m {
                        let (sp, cp) = (q as f64 * dphi).sin_cos();
                        let mut x = [0.0; 3];
                        for j in 0..3 {
                            x[j] = b * axis[j] + s * (cp * basis[0][j] + sp * basis[1][j]);
                        }
                        out.push(mk(x, s * w * dphi));
                    }
                }
            }
        }
        Locus::Cylinder { radius } => {
            let b = *radius;
            if dim == 2 {
                if b > r && b < big_r {
                    let m = 2 * ring_count(2.0 * PI * b, h);
                    let dphi = 2.0 * PI / m as f64;
                    for q in 0..m {
                        let (sp, cp) = (q as f64 * dphi).sin_cos();
                        out.push(mk([b * cp, b * sp, 0.0], b * dphi));
                    }
                }
                return out;
            }
            if b >= big_r {
                return out;
            }
            let t_lo = (r * r - b * b).max(0.0).sqrt();
            let t_hi = (big_r * big_r - b * b).sqrt();
            let mut ts = panels(t_lo, t_hi, h);
            let mirrored: Vec<(f64, f64)> = ts.iter().map(|&(t, w)| (-t, w)).collect();
            ts.extend(mirrored);
            let m = ring_count(2.0 * PI * b, h);
            let dphi = 2.0 * PI / m as f64;
            for (t, w) in ts {
                for q in 0..m {
                    let (sp, cp) = (q as f64 * dphi).sin_cos();
                    out.push(mk([b * cp, b * sp, t], b * w * dphi));
                }
            }
        }
        Locus::Cone { half_angle } => {
            let (sa, ca) = half_angle.sin_cos();
            for (t, w) in panels(r, big_r, h) {
                if dim == 2 {
                    for sgn in [-1.0, 1.0] {
                        out.push(mk([sgn * t * sa, t * ca, 0.0], w));
                    }
                } else {
                    let m = ring_count(2.0 * PI * t * sa, h);
                    let dphi = 2.0 * PI / m as f64;
                    for q in 0..m {
                        let (sp, cp) = (q as f64 * dphi).sin_cos();
                        out.push(mk([t * sa * cp, t * sa * sp, t * ca], t * sa * w * dphi));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        let ax2 = [0.0, 1.0];
        let s2: f64 = sphere_rule(2, 2.0, 0.1, &ax2, &[0.7])
            .iter()
            .map(|q| q.w)
            .sum();
        assert!((s2 - 4.0 * PI).abs() < 1e-12);
        let ax3 = [0.0, 0.0, 1.0];
        let s3: f64 = sphere_rule(3, 2.0, 0.1, &ax3, &[0.3, 2.0])
            .iter()
            .map(|q| q.w)
            .sum();
        assert!((s3 - 16.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn second_moment_on_sphere() {
        let ax3 = [0.0, 0.0, 1.0];
        let m: f64 = sphere_rule(3, 1.0, 0.05, &ax3, &[1.0])
            .iter()
            .map(|q| q.w * q.x[2] * q.x[2])
            .sum();
        assert!((m - 4.0 * PI / 3.0).abs() < 1e-3, "{m}");
    }

    #[test]
    fn interface_areas() {
        let plane = Locus::Plane {
            axis: vec![0.0, 0.0, 1.0],
            offset: 0.5,
        };
        let a: f64 = interface_rule(3, &plane, 1.0, 3.0, 0.05)
            .iter()
            .map(|q| q.w)
            .sum();
        assert!((a - PI * 8.0).abs() < 1e-2, "{a}");
        let cyl = Locus::Cylinder { radius: 1.5 };
        let a: f64 = interface_rule(3, &cyl, 1.0, 2.5, 0.05)
            .iter()
            .map(|q| q.w)
            .sum();
        assert!((a - 2.0 * PI * 1.5 * 4.0).abs() < 1e-2, "{a}");
        let line = Locus::Plane {
            axis: vec![0.0, 1.0],
            offset: 0.6,
        };
        let a: f64 = interface_rule(2, &line, 1.0, 2.0, 0.05)
            .iter()
            .map(|q| q.w)
            .sum();
        let exact = 2.0 * ((4.0f64 - 0.36).sqrt() - (1.0f64 - 0.36).sqrt());
        assert!((a - exact).abs() < 1e-12);
    }
}
