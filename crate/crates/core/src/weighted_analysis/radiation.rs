use num_complex::Complex64;
use rayon::prelude::*;

use crate::discretization::{wavenumber_scalar, Grid, GridFunction, Side};
use crate::medium::MediumProfile;

/// `k = [z mu_0]^{1/2}` at the nodes with `Im k >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveNumberField {
    pub z: Complex64,
    pub side: Side,
    pub k: Vec<Complex64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Wavenumber field with the side read off `Im z`; real `z` takes the
/// positive root.
pub fn wavenumber(z: Complex64, m: &MediumProfile, grid: &Grid) -> WaveNumberField {
    let side = if z.im < 0.0 { Side::Minus } else { Side::Plus };
    wavenumber_on_side(z, m, grid, side)
}

/// As [`wavenumber`]; for real `z` the side selects the sign of `k`.
pub fn wavenumber_on_side(
    z: Complex64,
    m: &MediumProfile,
    grid: &Grid,
    side: Side,
) -> WaveNumberField {
    let k: Vec<Complex64> = m
        .mu0_nodes(grid)
        .into_iter()
        .map(|mu0| wavenumber_scalar(z, mu0, side))
        .collect();
    WaveNumberField {
        z,
        side,
        a: k.iter().map(|k| k.re).collect(),
        b: k.iter().map(|k| k.im).collect(),
        k,
    }
}

/// `D u` (component-major) and `D_r u`; nodes with `|x| < h` are masked and
/// carry zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationField {
    pub du: Vec<Vec<Complex64>>,
    pub dru: Vec<Complex64>,
    pub excluded: Vec<bool>,
}

/// Central first differences, one-sided on the outer faces.
pub(crate) fn node_gradient(g: &Grid, v: &[Complex64], i: usize, out: &mut [Complex64]) {
    let mut rem = i;
    for j in (0..g.dim).rev() {
        let mj = rem % g.n;
        rem /= g.n;
        let st = g.n.pow((g.dim - 1 - j) as u32);
        out[j] = if mj == 0 {
            (v[i + st] - v[i]) / g.h
        } else if mj == g.n - 1 {
            (v[i] - v[i - st]) / g.h
        } else {
            (v[i + st] - v[i - st]) / (2.0 * g.h)
        };
    }
}

/// `D^{(+-)} u = grad_h u + ((N-1)/(2r)) x~ u -+ i k x~ u` and its radial
/// component; `Side::Plus` selects the outgoing operator.
pub fn radiation_field(u: &GridFunction, kf: &WaveNumberField, sign: Side) -> RadiationField {
    let g = &u.grid;
    let dim = g.dim;
    let c = (dim as f64 - 1.0) / 2.0;
    let s = -sign.sign();
    let per_node: Vec<(Vec<Complex64>, Complex64, bool)> = (0..u.values.len())
        .into_par_iter()
        .map(|i| {
            let mut x = [0.0; 3];
            g.coords(i, &mut x[..dim]);
            let r = x[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
            if r < g.h {
                return (
                    vec![Complex64::new(0.0, 0.0); dim],
                    Complex64::new(0.0, 0.0),
                    true,
                );
            }
            let mut grad = [Complex64::new(0.0, 0.0); 3];
            node_gradient(g, &u.values, i, &mut grad[..dim]);
            let radial = u.values[i] * (c / r + Complex64::new(0.0, s) * kf.k[i]);
            let mut du = Vec::with_capacity(dim);
            let mut dr = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                let e = x[j] / r;
                let d = grad[j] + radial * e;
                dr += d * e;
                du.push(d);
            }
            (du, dr, false)
        })
        .collect();
    let mut du = vec![Vec::with_capacity(u.values.len()); dim];
    let mut dru = Vec::with_capacity(u.values.len());
    let mut excluded = Vec::with_capacity(u.values.len());
    for (d, r, e) in per_node {
        for (j, dj) in d.into_iter().enumerate() {
            du[j].push(dj);
        }
        dru.push(r);
        excluded.push(e);
    }
    RadiationField { du, dru, excluded }
}
