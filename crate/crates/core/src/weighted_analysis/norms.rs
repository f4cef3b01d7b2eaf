use num_complex::Complex64;

use super::det_sum;
use crate::discretization::{Grid, GridFunction, Region};
use crate::error::{Error, Result};

/// `[sum over region of (1 + |x|)^{2t} |u|^2 h^N]^{1/2}`.
pub fn weighted_norm(u: &GridFunction, t: f64, region: Region) -> f64 {
    weighted_sum(&u.grid, t, region, |i| u.values[i].norm_sqr()).sqrt()
}

/// `sum over region of (1 + |x|)^{2t} density(i) h^N`.
pub(crate) fn weighted_sum(
    g: &Grid,
    t: f64,
    region: Region,
    density: impl Fn(usize) -> f64 + Sync,
) -> f64 {
    det_sum(g.node_count(), |i| {
        let r = g.radius(i);
        if region.contains(r) {
            (1.0 + r).powf(2.0 * t) * density(i)
        } else {
            0.0
        }
    }) * g.cell_volume()
}

/// Star norm of a density restricted to `region`.
pub(crate) fn star_sum(
    g: &Grid,
    t: f64,
    region: Region,
    density: impl Fn(usize) -> f64 + Sync,
) -> f64 {
    det_sum(g.node_count(), |i| {
        let r = g.radius(i);
        if !region.contains(r) {
            0.0
        } else if r < 1.0 {
            r * density(i)
        } else if r > 1.0 {
            (1.0 + r).powf(2.0 * t) * density(i)
        } else {
            0.0
        }
    }) * g.cell_volume()
}

/// `[int_{B_1} |x| |u|^2 + int_{E_1} (1 + |x|)^{2t} |u|^2]^{1/2}`; nodes on
/// the unit sphere belong to neither piece.
pub fn star_norm(u: &GridFunction, t: f64) -> f64 {
    star_sum(&u.grid, t, Region::All, |i| u.values[i].norm_sqr()).sqrt()
}

/// Weighted Sobolev norm of order 1 or 2: the sum over `|gamma| <= order`
/// of the weighted norms of the difference quotients. First differences
/// are central (one-sided on the outer faces); second differences live on
/// interior nodes and count as zero on the faces.
pub fn sobolev_norm(u: &GridFunction, order: u8, t: f64) -> Result<f64> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "Sobolev order {order} not in {{1, 2}}"
        )));
    }
    let g = &u.grid;
    let n = g.n;
    let dim = g.dim;
    let h = g.h;
    let strides = g.strides();
    let v = &u.values;
    let s = det_sum(v.len(), |i| {
        let mut m = [0usize; 3];
        g.multi_index(i, &mut m[..dim]);
        let mut acc = v[i].norm_sqr();
        for j in 0..dim {
            let st = strides[j];
            let d = if m[j] == 0 {
                (v[i + st] - v[i]) / h
            } else if m[j] == n - 1 {
                (v[i] - v[i - st]) / h
            } else {
                (v[i + st] - v[i - st]) / (2.0 * h)
            };
            acc += d.norm_sqr();
        }
        if order == 2 && !g.is_boundary(i) {
            let h2 = h * h;
            for j in 0..dim {
                let sj = strides[j];
                let d2: Complex64 = (v[i + sj] - 2.0 * v[i] + v[i - sj]) / h2;
                acc += d2.norm_sqr();
                for &sl in &strides[j + 1..] {
                    let mixed = (v[i + sj + sl] - v[i + sj - sl] - v[i - sj + sl] + v[i - sj - sl])
                        / (4.0 * h2);
                    acc += mixed.norm_sqr();
                }
            }
        }
        (1.0 + g.radius(i)).powf(2.0 * t) * acc
    });
    Ok((s * g.cell_volume()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::build_grid;

    #[test]
    fn zero_field() {
        let g = build_grid(2, 4.0, 0.25, None).unwrap();
        let u = GridFunction::zeros(&g);
        assert_eq!(weighted_norm(&u, 0.5, Region::All), 0.0);
        assert_eq!(star_norm(&u, 1.0), 0.0);
        assert_eq!(sobolev_norm(&u, 2, 1.0).unwrap(), 0.0);
        assert!(sobolev_norm(&u, 3, 1.0).is_err());
    }

    #[test]
    fn ball_volume_converges() {
        let exact = (4.0 * std::f64::consts::PI / 3.0).sqrt();
        let mut errs = vec![];
        for h in [0.125, 0.0625] {
            let g = build_grid(3, 4.0, h, None).unwrap();
            let u = GridFunction::from_fn(&g, |_| Complex64::new(1.0, 0.0));
            errs.push((weighted_norm(&u, 0.0, Region::Ball { radius: 1.0 }) - exact).abs());
        }
        assert!(errs[1] < 0.02 && errs[1] < errs[0], "{errs:?}");
    }
}
