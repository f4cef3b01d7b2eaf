//! Every term of the weighted energy identity on a shell `B_{rR}`, for a
//! field `u` with source `f = -mu_0^{-1} Delta u - z u`.
//!
//! With `phi = alpha(x) xi(|x|)`, `D u = grad u + ((N-1)/(2r)) x~ u - i k x~ u`
//! and `b = Im k`, the identity reads
//!
//! ```text
//!   int (b phi + phi'/2) |Du|^2
//! + sum_l int_{dOmega_l} phi Im(conj k du/dn conj u)
//! + int (phi/r - phi') (|Du|^2 - |D_r u|^2)
//! + c_N int r^-2 (phi/r - phi'/2 + b phi) |u|^2
//! = Re int phi mu_0 f conj(D_r u)
//! + 1/2 sum_l int_{dOmega_l} phi ((N-1) b / r + |k|^2) (x~ . n) |u|^2
//! + 1/2 int_{S_R} phi (2|D_r u|^2 - |Du|^2 - c_N r^-2 |u|^2)
//! - 1/2 int_{S_r} (same)
//! ```
//!
//! When `alpha` jumps across an interface the fluxes that do not involve
//! `k` no longer cancel between the two sides. They are kept as the extra
//! left-hand term
//!
//! ```text
//! sum_l int (alpha_l - alpha_{l+1}) xi [ -Re(du/dn conj(du/dr)) + |grad u|^2 (x~ . n) / 2
//!     - ((N-1)/(2r)) Re(du/dn conj u) - ((N-1)/(4 r^2)) (x~ . n) |u|^2 ] dS
//! ```
//!
//! with `n` pointing from layer `l` into `l + 1`; it vanishes for `alpha = 1`.
//!
//! Volume and sphere integrals use product rules whose panels never straddle
//! an interface; grid fields are evaluated by multilinear interpolation of
//! nodal values, central gradients and `Delta_h u`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{c_n, cuts_for, interface_rule, radial_rule, sphere_rule, QuadPoint};
use super::xi::XiWeight;
use crate::discretization::{laplacian_h, wavenumber_scalar, GridFunction, Side};
use crate::error::{Error, Result};
use crate::geometry::dot;
use crate::medium::MediumProfile;

/// Value, gradient and Laplacian of a field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub u: Complex64,
    pub grad: [Complex64; 3],
    pub lap: Complex64,
}

/// Anything that can be sampled pointwise inside the shell.
pub trait FieldSource: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, x: &[f64; 3]) -> FieldSample;
}

/// Closed-form field, used to check the quadrature against exact data.
pub struct AnalyticField<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64; 3]) -> FieldSample + Sync> FieldSource for AnalyticField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, x: &[f64; 3]) -> FieldSample {
        (self.f)(x)
    }
}

/// Multilinear interpolation of the nodal value, central gradient and
/// discrete Laplacian of a grid function.
pub struct GridInterp<'a> {
    u: &'a GridFunction,
    strides: Vec<usize>,
}

impl<'a> GridInterp<'a> {
    /// Valid for points with `|x|_inf <= reach`; needs `reach <= rmax - 2h`
    /// so every stencil stays on the lattice.
    pub fn new(u: &'a GridFunction, reach: f64) -> Result<Self> {
        let g = &u.grid;
        if reach > g.rmax - 2.0 * g.h + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "radius {reach} exceeds the interpolation range rmax - 2h = {}",
                g.rmax - 2.0 * g.h
            )));
        }
        Ok(Self {
            u,
            strides: g.strides(),
        })
    }
}

impl FieldSource for GridInterp<'_> {
    fn dim(&self) -> usize {
        self.u.grid.dim
    }

    fn sample(&self, x: &[f64; 3]) -> FieldSample {
        let g = &self.u.grid;
        let v = &self.u.values;
        let dim = g.dim;
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for j in 0..dim {
            let p = (x[j] + g.rmax) / g.h;
            let i = (p.floor() as isize).clamp(1, g.n as isize - 3) as usize;
            base[j] = i;
            frac[j] = p - i as f64;
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut out = FieldSample {
            u: zero,
            grad: [zero; 3],
            lap: zero,
        };
        let inv2h = 0.5 / g.h;
        let inv_h2 = 1.0 / (g.h * g.h);
        for corner in 0..(1usize << dim) {
            let mut idx = 0;
            let mut w = 1.0;
            for j in 0..dim {
                let bit = (corner >> (dim - 1 - j)) & 1;
                idx += (base[j] + bit) * self.strides[j];
                w *= if bit == 1 { frac[j] } else { 1.0 - frac[j] };
            }
            let c = v[idx];
            let mut lap = -2.0 * dim as f64 * c;
            for j in 0..dim {
                let (p, m) = (v[idx + self.strides[j]], v[idx - self.strides[j]]);
                out.grad[j] += w * (p - m) * inv2h;
                lap += p + m;
            }
            out.u += w * c;
            out.lap += w * lap * inv_h2;
        }
        out
    }
}

/// Shell `inner < |x| < outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub inner: f64,
    pub outer: f64,
}

/// Layerwise constant factor `alpha` of the weight `phi = alpha xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alpha {
    /// `1 / sqrt(mu_0)`.
    #[default]
    InverseSqrtMu0,
    Unit,
}

impl Alpha {
    fn at(self, mu0: f64) -> f64 {
        match self {
            Alpha::InverseSqrtMu0 => 1.0 / mu0.sqrt(),
            Alpha::Unit => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityTerm {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub shell: Shell,
    pub terms: Vec<IdentityTerm>,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|`.
    pub residual: f64,
    /// Residual over the sum of the absolute term values.
    pub relative: f64,
    /// `(lambda / 2) sum_l int xi (alpha_l nu_l - alpha_{l+1} nu_{l+1}) (x~ . n_l) |u|^2`
    /// over the interfaces, with `lambda = Re z`. For real `z` it equals the
    /// interface term on the right.
    pub interface_sign_form: f64,
    /// Relative distance between a supplied `f` and the recomputed one on
    /// the shell nodes.
    pub source_mismatch: Option<f64>,
}

impl IdentityReport {
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// Rows `term, value_re, value_im`, followed by the totals.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["term", "value_re", "value_im"])
            .map_err(csv_err)?;
        let totals = [
            ("lhs", self.lhs),
            ("rhs", self.rhs),
            ("residual", self.residual),
            ("relative_residual", self.relative),
            ("interface_sign_form", self.interface_sign_form),
        ];
        for (name, v) in self
            .terms
            .iter()
            .map(|t| (t.name.as_str(), t.value))
            .chain(totals)
        {
            w.write_record([name, &format!("{v:e}"), "0"])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub const TERM_NAMES: [&str; 9] = [
    "lhs_absorption",
    "lhs_interface_flux",
    "lhs_angular",
    "lhs_potential",
    "lhs_weight_jump",
    "rhs_source",
    "rhs_interface",
    "rhs_outer_sphere",
    "rhs_inner_sphere",
];

struct Ctx<'a> {
    dim: usize,
    z: Complex64,
    side: Side,
    m: &'a MediumProfile,
    xi: &'a XiWeight,
    alpha: Alpha,
    cn: f64,
}

struct Local {
    rho: f64,
    mu0: f64,
    k: Complex64,
    phi: f64,
    dphi: f64,
    dr: Complex64,
    du2: f64,
    dr2: f64,
}

impl Ctx<'_> {
    fn local(&self, x: &[f64; 3], s: &FieldSample) -> Local {
        let dim = self.dim;
        let rho = x[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut e = [0.0; 3];
        for j in 0..dim {
            e[j] = x[j] / rho;
        }
        let mu0 = self.m.mu0_at(&x[..dim], 0.0);
        let k = wavenumber_scalar(self.z, mu0, self.side);
        let a = self.alpha.at(mu0);
        let radial = s.u * ((dim as f64 - 1.0) / (2.0 * rho) - Complex64::new(0.0, 1.0) * k);
        let mut du = [Complex64::new(0.0, 0.0); 3];
        let mut dr = Complex64::new(0.0, 0.0);
        for j in 0..dim {
            du[j] = s.grad[j] + radial * e[j];
            dr += du[j] * e[j];
        }
        let du2 = du[..dim].iter().map(|c| c.norm_sqr()).sum();
        Local {
            rho,
            mu0,
            k,
            phi: a * self.xi.value(rho),
            dphi: a * self.xi.derivative(rho),
            dr,
            du2,
            dr2: dr.norm_sqr(),
        }
    }

    /// Integrands of the four volume terms.
    fn volume(&self, x: &[f64; 3], s: &FieldSample) -> [f64; 4] {
        let l = self.local(x, s);
        let b = l.k.im;
        let u2 = s.u.norm_sqr();
        let mu0f = -s.lap - self.z * l.mu0 * s.u;
        [
            (b * l.phi + 0.5 * l.dphi) * l.du2,
            (l.phi / l.rho - l.dphi) * (l.du2 - l.dr2),
            self.cn / (l.rho * l.rho) * (l.phi / l.rho - 0.5 * l.dphi + b * l.phi) * u2,
            (l.phi * mu0f * l.dr.conj()).re,
        ]
    }

    fn sphere(&self, x: &[f64; 3], s: &FieldSample) -> f64 {
        let l = self.local(x, s);
        l.phi * (2.0 * l.dr2 - l.du2 - self.cn / (l.rho * l.rho) * s.u.norm_sqr())
    }
}

fn integrate<T: Sync, const K: usize>(pts: &[T], f: impl Fn(&T) -> [f64; K] + Sync) -> [f64; K] {
    let partial: Vec<[f64; K]> = pts
        .par_chunks(1024)
        .map(|c| {
            let mut acc = [0.0; K];
            for p in c {
                let v = f(p);
                for q in 0..K {
                    acc[q] += v[q];
                }
            }
            acc
        })
        .collect();
    let mut acc = [0.0; K];
    for p in partial {
        for q in 0..K {
            acc[q] += p[q];
        }
    }
    acc
}

/// Evaluates every term of the identity for an arbitrary field source;
/// `h` sets the quadrature spacing.
pub fn identity_terms(
    src: &dyn FieldSource,
    z: Complex64,
    m: &MediumProfile,
    xi: &XiWeight,
    shell: Shell,
    alpha: Alpha,
    h: f64,
) -> Result<IdentityReport> {
    let dim = src.dim();
    if m.dim() != dim {
        return Err(Error::ShapeMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    let (r, big_r) = (shell.inner, shell.outer);
    if !(r > 0.0 && big_r > r) {
        return Err(Error::InvalidArgument(format!(
            "shell ({r}, {big_r}) is empty"
        )));
    }
    let ctx = Ctx {
        dim,
        z,
        side: if z.im < 0.0 { Side::Minus } else { Side::Plus },
        m,
        xi,
        alpha,
        cn: c_n(dim),
    };
    let cuts = cuts_for(&m.partition);
    let mut kinks = xi.kinks();
    kinks.extend(cuts.radii.iter().copied());

    let radial = radial_rule(r, big_r, h, &kinks);
    let shells: Vec<[f64; 4]> = radial
        .par_iter()
        .map(|&(rho, wr)| {
            let pts = sphere_rule(dim, rho, h, &cuts.axis, &(cuts.angles_at)(rho));
            let mut acc = [0.0; 4];
            for q in pts {
                let v = ctx.volume(&q.x, &src.sample(&q.x));
                for t in 0..4 {
                    acc[t] += wr * q.w * v[t];
                }
            }
            acc
        })
        .collect();
    let mut vol = [0.0; 4];
    for s in shells {
        for t in 0..4 {
            vol[t] += s[t];
        }
    }

    let sphere_term = |rho: f64| {
        let pts = sphere_rule(dim, rho, h, &cuts.axis, &(cuts.angles_at)(rho));
        integrate(&pts, |q: &QuadPoint| {
            [q.w * ctx.sphere(&q.x, &src.sample(&q.x))]
        })[0]
    };
    let outer = 0.5 * sphere_term(big_r);
    let inner = -0.5 * sphere_term(r);

    let lambda = z.re;
    let mut iface = [0.0; 4];
    for i in m.partition.interfaces() {
        let (lo, hi) = i.between;
        let (nu_lo, nu_hi) = (m.nu(lo), m.nu(hi));
        let (k_lo, k_hi) = (
            wavenumber_scalar(z, nu_lo, ctx.side),
            wavenumber_scalar(z, nu_hi, ctx.side),
        );
        let (a_lo, a_hi) = (alpha.at(nu_lo), alpha.at(nu_hi));
        let pts = interface_rule(dim, &i.locus, r, big_r, h);
        let v = integrate(&pts, |q: &QuadPoint| {
            let s = src.sample(&q.x);
            let n = i.locus.normal(&q.x[..dim]);
            let rho = q.x[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
            let xn = dot(&q.x[..dim], &n) / rho;
            let xi_v = xi.value(rho);
            let dn: Complex64 = (0..dim).map(|j| s.grad[j] * n[j]).sum();
            let g = dn * s.u.conj();
            let u2 = s.u.norm_sqr();
            let nm1 = dim as f64 - 1.0;
            let side_lo = a_lo * xi_v * (nm1 * k_lo.im / rho + k_lo.norm_sqr());
            let side_hi = a_hi * xi_v * (nm1 * k_hi.im / rho + k_hi.norm_sqr());
            let dr: Complex64 = (0..dim).map(|j| s.grad[j] * (q.x[j] / rho)).sum();
            let grad2: f64 = s.grad[..dim].iter().map(|c| c.norm_sqr()).sum();
            let c = 0.5 * (dim as f64 - 1.0);
            let jump = xi_v * (-(dn * dr.conj()).re + 0.5 * grad2 * xn - c / rho * g.re)
                - 0.5 * c * xi_v / (rho * rho) * xn * u2;
            [
                q.w * xi_v * (a_lo * (k_lo.conj() * g).im - a_hi * (k_hi.conj() * g).im),
                0.5 * q.w * xn * u2 * (side_lo - side_hi),
                0.5 * q.w * lambda * xi_v * xn * u2 * (a_lo * nu_lo - a_hi * nu_hi),
                q.w * (a_lo - a_hi) * jump,
            ]
        });
        for t in 0..4 {
            iface[t] += v[t];
        }
    }

    let values = [
        vol[0], iface[0], vol[1], vol[2], iface[3], vol[3], iface[1], outer, inner,
    ];
    let lhs = values[..5].iter().sum::<f64>();
    let rhs = values[5..].iter().sum::<f64>();
    let scale: f64 = values.iter().map(|v| v.abs()).sum();
    let residual = (lhs - rhs).abs();
    Ok(IdentityReport {
        shell,
        terms: TERM_NAMES
            .iter()
            .zip(values)
            .map(|(n, v)| IdentityTerm {
                name: n.to_string(),
                value: v,
            })
            .collect(),
        lhs,
        rhs,
        residual,
        relative: if scale > 0.0 { residual / scale } else { 0.0 },
        interface_sign_form: iface[2],
        source_mismatch: None,
    })
}

/// The identity for a grid function, with `f = -mu_0^{-1} Delta_h u - z u`
/// recomputed from `u`. A supplied `f` is only compared against the
/// recomputed source on the shell nodes.
pub fn identity_residual(
    u: &GridFunction,
    f: Option<&GridFunction>,
    z: Complex64,
    m: &MediumProfile,
    xi: &XiWeight,
    shell: Shell,
    alpha: Alpha,
) -> Result<IdentityReport> {
    let g = &u.grid;
    let width = shell.outer - shell.inner;
    if width < 4.0 * g.h {
        return Err(Error::ShellTooThin {
            width,
            limit: 4.0 * g.h,
        });
    }
    if shell.inner < 2.0 * g.h {
        return Err(Error::InvalidArgument(format!(
            "inner radius {} below 2h = {}",
            shell.inner,
            2.0 * g.h
        )));
    }
    let src = GridInterp::new(u, shell.outer)?;
    let mut report = identity_terms(&src, z, m, xi, shell, alpha, g.h)?;
    if let Some(f) = f {
        if f.values.len() != u.values.len() {
            return Err(Error::ShapeMismatch {
                expected: u.values.len(),
                found: f.values.len(),
            });
        }
        let lap = laplacian_h(g, &u.values);
        let mu0 = m.mu0_nodes(g);
        let (mut diff, mut norm) = (0.0, 0.0);
        for i in 0..u.values.len() {
            let rho = g.radius(i);
            if rho > shell.inner && rho < shell.outer {
                let fh = -lap[i] / mu0[i] - z * u.values[i];
                diff += (fh - f.values[i]).norm_sqr();
                norm += fh.norm_sqr();
            }
        }
        report.source_mismatch = Some(if norm > 0.0 {
            (diff / norm).sqrt()
        } else {
            diff.sqrt()
        });
    }
    Ok(report)
}
