//! Truncated uniform lattice on `[-rmax, rmax]^N` with an absorbing sponge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absorbing layer `rmax - w <= |x|_inf <= rmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sponge {
    pub width: f64,
    /// `None` selects `2 max Re k` at assembly time.
    #[serde(default)]
    pub strength: Option<f64>,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
}

fn default_exponent() -> f64 {
    2.0
}

impl Sponge {
    pub fn default_for(rmax: f64) -> Self {
        Self {
            width: rmax / 4.0,
            strength: None,
            exponent: 2.0,
        }
    }
}

/// Subsets of the lattice used by norms and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Region {
    All,
    /// `|x| < R`.
    Ball {
        radius: f64,
    },
    /// `|x| > s`.
    Exterior {
        radius: f64,
    },
    /// `r < |x| < R`.
    Shell {
        inner: f64,
        outer: f64,
    },
}

impl Region {
    pub fn contains(&self, r: f64) -> bool {
        match *self {
            Region::All => true,
            Region::Ball { radius } => r < radius,
            Region::Exterior { radius } => r > radius,
            Region::Shell { inner, outer } => r > inner && r < outer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub rmax: f64,
    pub h: f64,
    /// Nodes per axis, `2 rmax / h + 1`.
    pub n: usize,
    pub sponge: Option<Sponge>,
}

/// Builds the lattice; node `(i_1, .., i_N)` sits at `-rmax + i_j h` and
/// the first coordinate varies slowest.
pub fn build_grid(dim: usize, rmax: f64, h: f64, sponge: Option<Sponge>) -> Result<Grid> {
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidGrid(format!(
            "dimension {dim} not in {{2, 3}}"
        )));
    }
    if !(rmax >= 4.0) || !rmax.is_finite() {
        return Err(Error::InvalidGrid(format!("rmax = {rmax} < 4")));
    }
    if !(h > 0.0) || h > rmax / 16.0 {
        return Err(Error::InvalidGrid(format!(
            "h = {h} must lie in (0, rmax/16]"
        )));
    }
    let cells = 2.0 * rmax / h;
    if (cells - cells.round()).abs() > 1e-9 * cells {
        return Err(Error::InvalidGrid(format!(
            "rmax / h = {} is not an integer",
            rmax / h
        )));
    }
    if let Some(s) = &sponge {
        if s.width < 4.0 * h - 1e-12 || s.width >= rmax {
            return Err(Error::InvalidGrid(format!(
                "sponge width {} must lie in [4h, rmax)",
                s.width
            )));
        }
        if s.strength.is_some_and(|v| !(v >= 0.0)) || !(s.exponent > 0.0) {
            return Err(Error::InvalidGrid(
                "sponge strength and exponent must be positive".into(),
            ));
        }
    }
    Ok(Grid {
        dim,
        rmax,
        h,
        n: cells.round() as usize + 1,
        sponge,
    })
}

impl Grid {
    pub fn node_count(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Quadrature weight of one node.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn strides(&self) -> Vec<usize> {
        (0..self.dim)
            .map(|j| self.n.pow((self.dim - 1 - j) as u32))
            .collect()
    }

    pub fn multi_index(&self, mut idx: usize, out: &mut [usize]) {
        for j in (0..self.dim).rev() {
            out[j] = idx % self.n;
            idx /= self.n;
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.rmax + i as f64 * self.h
    }

    pub fn coords(&self, idx: usize, out: &mut [f64]) {
        let mut rem = idx;
        for j in (0..self.dim).rev() {
            out[j] = self.coord(rem % self.n);
            rem /= self.n;
        }
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        self.coords(idx, &mut x);
        x
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let mut rem = idx;
        let mut s = 0.0;
        for _ in 0..self.dim {
            let c = self.coord(rem % self.n);
            s += c * c;
            rem /= self.n;
        }
        s.sqrt()
    }

    /// True for nodes on the outer faces of the box.
    pub fn is_boundary(&self, idx: usize) -> bool {
        let mut rem = idx;
        for _ in 0..self.dim {
            let i = rem % self.n;
            if i == 0 || i == self.n - 1 {
                return true;
            }
            rem /= self.n;
        }
        false
    }

    pub fn index_of(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Radius of the largest ball free of the sponge.
    pub fn physical_radius(&self) -> f64 {
        self.rmax - self.sponge.as_ref().map_or(0.0, |s| s.width)
    }

    /// Sponge profile `s(x)` for a resolved strength `sigma0`.
    pub fn sponge_profile(&self, x: &[f64], sigma0: f64) -> f64 {
        let Some(s) = &self.sponge else { return 0.0 };
        let inf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let start = self.rmax - s.width;
        if inf <= start {
            0.0
        } else {
            sigma0 * ((inf - start) / s.width).powf(s.exponent)
        }
    }

    /// Points-per-wavelength guard `2 pi / max|k| >= 8 h`.
    pub fn require_resolution(&self, max_abs_k: f64) -> Result<()> {
        if max_abs_k <= 0.0 {
            return Ok(());
        }
        let wavelength = 2.0 * std::f64::consts::PI / max_abs_k;
        let limit = 8.0 * self.h;
        if wavelength < limit {
            return Err(Error::BadResolution { wavelength, limit });
        }
        Ok(())
    }

    pub fn region_mask(&self, region: Region) -> Vec<bool> {
        (0..self.node_count())
            .map(|i| region.contains(self.radius(i)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts() {
        assert_eq!(
            build_grid(2, 16.0, 0.25, None).unwrap().node_count(),
            129 * 129
        );
        assert_eq!(
            build_grid(3, 8.0, 0.25, None).unwrap().node_count(),
            65 * 65 * 65
        );
    }

    #[test]
    fn resolution_guard() {
        let g = build_grid(2, 16.0, 0.25, None).unwrap();
        assert!(matches!(
            g.require_resolution(5.0),
            Err(Error::BadResolution { .. })
        ));
        assert!(g.require_resolution(1.0).is_ok());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_grid(2, 3.0, 0.125, None).is_err());
        assert!(build_grid(2, 4.0, 0.5, None).is_err());
        assert!(build_grid(2, 4.0, 0.3, None).is_err());
        let thin = Sponge {
            width: 0.5,
            strength: None,
            exponent: 2.0,
        };
        assert!(build_grid(2, 8.0, 0.25, Some(thin)).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let g = build_grid(3, 4.0, 0.25, None).unwrap();
        let mut m = [0usize; 3];
        for idx in [0, 17, 1234, g.node_count() - 1] {
            g.multi_index(idx, &mut m);
            assert_eq!(g.index_of(&m), idx);
            let x = g.point(idx);
            assert_eq!(x[0], g.coord(m[0]));
        }
        assert!(g.is_boundary(0));
        assert!(!g.is_boundary(g.index_of(&[16, 16, 16])));
        assert_eq!(g.radius(g.index_of(&[16, 16, 16])), 0.0);
    }

    #[test]
    fn sponge_profile_ramps() {
        let g = build_grid(2, 8.0, 0.25, Some(Sponge::default_for(8.0))).unwrap();
        assert_eq!(g.sponge_profile(&[5.0, 0.0], 3.0), 0.0);
        assert!((g.sponge_profile(&[8.0, 1.0], 3.0) - 3.0).abs() < 1e-15);
        assert!((g.sponge_profile(&[-7.0, 1.0], 3.0) - 0.75).abs() < 1e-15);
    }
}
