//! Layered partitions of R^N: planar stacks, concentric cylinders and the
//! two-region cone used for the classical interface conditions.
//!
//! Every family is described by a scalar level coordinate `s(x)` whose
//! sublevel intervals, cut at the breakpoints, are the layers. Interfaces
//! are the level sets `s(x) = b`, and the gradient of `s` is the outward
//! normal of the lower layer.

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, CertificateReport};
use crate::error::{Error, Result};

/// Shape of the integer index set `L` of the layer family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    TwoSidedInfinite,
    LeftFiniteRightInfinite,
    LeftInfiniteRightFinite,
    Finite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerIndexSet {
    pub kind: IndexKind,
    pub l_minus: Option<i64>,
    pub l_plus: Option<i64>,
    /// Inclusive range of instantiated layers.
    pub window: (i64, i64),
}

impl LayerIndexSet {
    pub fn new(
        kind: IndexKind,
        l_minus: Option<i64>,
        l_plus: Option<i64>,
        window: (i64, i64),
    ) -> Result<Self> {
        let (lo, hi) = window;
        if lo > 0 || hi < 0 {
            return Err(Error::InvalidGeometry(format!(
                "window [{lo}, {hi}] must contain 0"
            )));
        }
        let left_finite = matches!(kind, IndexKind::LeftFiniteRightInfinite | IndexKind::Finite);
        let right_finite = matches!(kind, IndexKind::LeftInfiniteRightFinite | IndexKind::Finite);
        match (left_finite, l_minus) {
            (true, None) => {
                return Err(Error::InvalidGeometry(
                    "finite-left index set needs l_minus".into(),
                ))
            }
            (true, Some(lm)) if lm > 0 || lo < lm => {
                return Err(Error::InvalidGeometry(format!(
                    "window low end {lo} below smallest index {lm}"
                )))
            }
            _ => {}
        }
        match (right_finite, l_plus) {
            (true, None) => {
                return Err(Error::InvalidGeometry(
                    "finite-right index set needs l_plus".into(),
                ))
            }
            (true, Some(lp)) if lp < 0 || hi > lp => {
                return Err(Error::InvalidGeometry(format!(
                    "window high end {hi} above largest index {lp}"
                )))
            }
            _ => {}
        }
        Ok(Self {
            kind,
            l_minus: if left_finite { l_minus } else { None },
            l_plus: if right_finite { l_plus } else { None },
            window,
        })
    }

    /// A finite index set that coincides with its window.
    pub fn finite(lo: i64, hi: i64) -> Result<Self> {
        Self::new(IndexKind::Finite, Some(lo), Some(hi), (lo, hi))
    }

    pub fn len(&self) -> usize {
        (self.window.1 - self.window.0 + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.window.1 < self.window.0
    }

    pub fn layers(&self) -> impl Iterator<Item = i64> {
        self.window.0..=self.window.1
    }

    pub fn position(&self, layer: i64) -> Option<usize> {
        (self.window.0..=self.window.1)
            .contains(&layer)
            .then(|| (layer - self.window.0) as usize)
    }
}

/// Geometry family of a layered partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// Slabs `b_l < x . axis < b_{l+1}`.
    PlanarStack { axis: Vec<f64> },
    /// Coaxial shells `b_l < (x_1^2 + x_2^2)^{1/2} < b_{l+1}`.
    ConcentricCylinders,
    /// Two regions separated by a cone with vertex at the origin around
    /// the positive `x_N` axis. Layer 0 is the inside of the cone.
    Cone { half_angle: f64 },
}

/// Result of [`LayeredPartition::classify_point`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Layer(i64),
    /// The point lies on the interface between `lower` and `lower + 1`.
    InterfaceHit {
        lower: i64,
    },
}

/// Level-set descriptor of one separating surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Locus {
    Plane { axis: Vec<f64>, offset: f64 },
    Cylinder { radius: f64 },
    Cone { half_angle: f64 },
}

impl Locus {
    /// Signed level value; negative on the side of the lower layer.
    pub fn level(&self, x: &[f64]) -> f64 {
        match self {
            Locus::Plane { axis, offset } => dot(axis, x) - offset,
            Locus::Cylinder { radius } => cyl_radius(x) - radius,
            Locus::Cone { half_angle } => cone_level(x, *half_angle),
        }
    }

    /// Unit normal pointing from the lower layer into the upper one.
    pub fn normal(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Locus::Plane { axis, .. } => axis.clone(),
            Locus::Cylinder { .. } => {
                let rho = cyl_radius(x);
                let mut n = vec![0.0; x.len()];
                if rho > 0.0 {
                    n[0] = x[0] / rho;
                    n[1] = x[1] / rho;
                } else {
                    n[0] = 1.0;
                }
                n
            }
            Locus::Cone { half_angle } => {
                let dim = x.len();
                let (s, c) = half_angle.sin_cos();
                let rho: f64 = x[..dim - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
                let mut n = vec![0.0; dim];
                if rho > 0.0 {
                    for j in 0..dim - 1 {
                        n[j] = c * x[j] / rho;
                    }
                } else {
                    n[0] = c;
                }
                n[dim - 1] = -s;
                n
            }
        }
    }

    /// Deterministic quasi-uniform sample of at least `count` points of the
    /// locus inside the box `[-half_width, half_width]^dim`. Returns an empty
    /// list when the locus misses the box.
    pub fn sample(&self, dim: usize, half_width: f64, count: usize) -> Vec<Vec<f64>> {
        let l = half_width;
        let inside = |p: &[f64]| p.iter().all(|v| v.abs() <= l * (1.0 + 1e-12));
        let mut out = Vec::with_capacity(count);
        let max_draws = 64 * count;
        let mut seq = Kronecker::new(dim - 1);
        let mut draws = 0;
        while out.len() < count && draws < max_draws {
            draws += 1;
            let t = seq.next_point();
            let p = match self {
                Locus::Plane { axis, offset } => {
                    let basis = complement_basis(axis);
                    let span = l * (dim as f64).sqrt();
                    let mut p: Vec<f64> = axis.iter().map(|a| a * offset).collect();
                    for (b, tj) in basis.iter().zip(&t) {
                        for (pi, bi) in p.iter_mut().zip(b) {
                            *pi += (2.0 * tj - 1.0) * span * bi;
                        }
                    }
                    p
                }
                Locus::Cylinder { radius } => {
                    let theta = 2.0 * std::f64::consts::PI * t[0];
                    let mut p = vec![0.0; dim];
                    p[0] = radius * theta.cos();
                    p[1] = radius * theta.sin();
                    for j in 2..dim {
                        p[j] = (2.0 * t[j - 1] - 1.0) * l;
                    }
                    p
                }
                Locus::Cone { half_angle } => {
                    // height along the axis, then the angular coordinates
                    let height = t[0] * l;
                    let rho = height * half_angle.tan();
                    let mut p = vec![0.0; dim];
                    p[dim - 1] = height;
                    match dim {
                        2 => p[0] = if draws % 2 == 0 { rho } else { -rho },
                        _ => {
                            let psi = 2.0 * std::f64::consts::PI * t[1];
                            p[0] = rho * psi.cos();
                            p[1] = rho * psi.sin();
                        }
                    }
                    p
                }
            };
            if inside(&p) {
                out.push(p);
            }
        }
        out
    }
}

/// One separating surface between consecutive layers; it is both the upper
/// face of `between.0` and the lower face of `between.1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interface {
    pub between: (i64, i64),
    pub locus: Locus,
}

/// The family `{Omega_l}` together with its index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredPartition {
    pub dim: usize,
    pub family: Family,
    pub breakpoints: Vec<f64>,
    pub index_set: LayerIndexSet,
    /// Index of the layer below the first breakpoint.
    first_layer: i64,
}

impl LayeredPartition {
    /// Planar stack with normal `axis` (defaults to `e_N`). Breakpoints are
    /// the slab faces; layer 0 is the slab containing the origin.
    pub fn planar_stack(
        dim: usize,
        breakpoints: Vec<f64>,
        axis: Option<Vec<f64>>,
        index_set: Option<LayerIndexSet>,
    ) -> Result<Self> {
        check_dim(dim)?;
        let axis = match axis {
            Some(a) => normalize(&a, dim)?,
            None => {
                let mut e = vec![0.0; dim];
                e[dim - 1] = 1.0;
                e
            }
        };
        check_increasing(&breakpoints)?;
        if breakpoints.contains(&0.0) {
            return Err(Error::InvalidGeometry(
                "layer 0 must contain the origin; no breakpoint may be 0".into(),
            ));
        }
        let n_neg = breakpoints.iter().filter(|&&b| b < 0.0).count() as i64;
        let n_pos = breakpoints.len() as i64 - n_neg;
        let index_set = resolve_index_set(index_set, (-n_neg, n_pos))?;
        Ok(Self {
            dim,
            family: Family::PlanarStack { axis },
            breakpoints,
            index_set,
            first_layer: -n_neg,
        })
    }

    /// Concentric cylinders around the `x_N` axis (circles for `N = 2`);
    /// breakpoints are the radii `0 < b_1 < b_2 < ...`.
    pub fn concentric_cylinders(
        dim: usize,
        radii: Vec<f64>,
        index_set: Option<LayerIndexSet>,
    ) -> Result<Self> {
        check_dim(dim)?;
        check_increasing(&radii)?;
        if radii.first().is_some_and(|&b| b <= 0.0) {
            return Err(Error::InvalidGeometry(
                "cylinder radii must be positive".into(),
            ));
        }
        let index_set = resolve_index_set(index_set, (0, radii.len() as i64))?;
        Ok(Self {
            dim,
            family: Family::ConcentricCylinders,
            breakpoints: radii,
            index_set,
            first_layer: 0,
        })
    }

    /// Two regions separated by a single locus. Layer 0 is the lower side
    /// (below the plane, inside the cylinder or cone). Unlike the stacked
    /// builders the interface may pass through the origin.
    pub fn two_region(dim: usize, locus: Locus) -> Result<Self> {
        check_dim(dim)?;
        let index_set = LayerIndexSet::finite(0, 1)?;
        let (family, b) = match locus {
            Locus::Plane { axis, offset } => (
                Family::PlanarStack {
                    axis: normalize(&axis, dim)?,
                },
                offset,
            ),
            Locus::Cylinder { radius } if radius > 0.0 => (Family::ConcentricCylinders, radius),
            Locus::Cylinder { .. } => {
                return Err(Error::InvalidGeometry(
                    "cylinder radius must be positive".into(),
                ))
            }
            Locus::Cone { half_angle }
                if half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2 =>
            {
                (Family::Cone { half_angle }, 0.0)
            }
            Locus::Cone { .. } => {
                return Err(Error::InvalidGeometry(
                    "cone half angle must lie in (0, pi/2)".into(),
                ))
            }
        };
        Ok(Self {
            dim,
            family,
            breakpoints: vec![b],
            index_set,
            first_layer: 0,
        })
    }

    pub fn window(&self) -> (i64, i64) {
        self.index_set.window
    }

    pub fn layer_count(&self) -> usize {
        self.index_set.len()
    }

    fn level(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::PlanarStack { axis } => dot(axis, x),
            Family::ConcentricCylinders => cyl_radius(x),
            Family::Cone { half_angle } => cone_level(x, *half_angle),
        }
    }

    fn locus_at(&self, b: f64) -> Locus {
        match &self.family {
            Family::PlanarStack { axis } => Locus::Plane {
                axis: axis.clone(),
                offset: b,
            },
            Family::ConcentricCylinders => Locus::Cylinder { radius: b },
            Family::Cone { half_angle } => Locus::Cone {
                half_angle: *half_angle,
            },
        }
    }

    /// Interfaces whose two sides both lie in the window.
    pub fn interfaces(&self) -> Vec<Interface> {
        let (lo, hi) = self.window();
        self.breakpoints
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| {
                let lower = self.first_layer + i as i64;
                (lower >= lo && lower < hi).then(|| Interface {
                    between: (lower, lower + 1),
                    locus: self.locus_at(b),
                })
            })
            .collect()
    }

    fn interface_below(&self, layer: i64) -> Option<Interface> {
        self.interfaces().into_iter().find(|i| i.between.1 == layer)
    }

    fn interface_above(&self, layer: i64) -> Option<Interface> {
        self.interfaces().into_iter().find(|i| i.between.0 == layer)
    }

    /// Layer containing `x`, or the interface within `tie_tol` of it.
    pub fn classify_point(&self, x: &[f64], tie_tol: f64) -> Result<Classification> {
        let s = self.level(x);
        let (lo, hi) = self.window();
        let out_of_window = |layer: i64| Error::OutOfWindow {
            point: x.to_vec(),
            layer,
            lo,
            hi,
        };
        for (i, &b) in self.breakpoints.iter().enumerate() {
            if (s - b).abs() < tie_tol {
                let lower = self.first_layer + i as i64;
                if lower < lo || lower + 1 > hi {
                    return Err(out_of_window(if lower < lo { lower } else { lower + 1 }));
                }
                return Ok(Classification::InterfaceHit { lower });
            }
        }
        let below = self.breakpoints.iter().filter(|&&b| b < s).count() as i64;
        let layer = self.first_layer + below;
        if layer < lo || layer > hi {
            return Err(out_of_window(layer));
        }
        Ok(Classification::Layer(layer))
    }

    /// Independent open-set membership predicate for layer `layer`.
    pub fn contains(&self, layer: i64, x: &[f64]) -> bool {
        let (lo, hi) = self.window();
        if layer < lo || layer > hi {
            return false;
        }
        let s = self.level(x);
        let i = (layer - self.first_layer) as usize;
        let lower = if i == 0 {
            f64::NEG_INFINITY
        } else {
            self.breakpoints[i - 1]
        };
        let upper = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
        s > lower && s < upper
    }

    /// Unit outward normal of `layer` at a point of its boundary.
    pub fn outward_normal(&self, layer: i64, x: &[f64], surf_tol: f64) -> Result<Vec<f64>> {
        let upper = self.interface_above(layer);
        let lower = self.interface_below(layer);
        let dist = |i: &Option<Interface>| {
            i.as_ref()
                .map(|i| i.locus.level(x).abs())
                .unwrap_or(f64::INFINITY)
        };
        let (du, dl) = (dist(&upper), dist(&lower));
        if du.min(dl) > surf_tol {
            return Err(Error::NotOnBoundary {
                point: x.to_vec(),
                layer,
            });
        }
        if du <= dl {
            Ok(upper.expect("finite distance").locus.normal(x))
        } else {
            Ok(lower
                .expect("finite distance")
                .locus
                .normal(x)
                .into_iter()
                .map(|v| -v)
                .collect())
        }
    }
}

fn resolve_index_set(given: Option<LayerIndexSet>, implied: (i64, i64)) -> Result<LayerIndexSet> {
    let set = match given {
        Some(s) => s,
        None => LayerIndexSet::finite(implied.0, implied.1)?,
    };
    let (lo, hi) = set.window;
    if lo < implied.0 || hi > implied.1 {
        return Err(Error::InvalidGeometry(format!(
            "window [{lo}, {hi}] exceeds the layers defined by the breakpoints [{}, {}]",
            implied.0, implied.1
        )));
    }
    Ok(set)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidGeometry(format!("dimension {dim} < 2")));
    }
    Ok(())
}

fn check_increasing(b: &[f64]) -> Result<()> {
    if b.iter().any(|v| !v.is_finite()) || b.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGeometry(
            "breakpoints must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn normalize(a: &[f64], dim: usize) -> Result<Vec<f64>> {
    let n = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if a.len() != dim || n == 0.0 || !n.is_finite() {
        return Err(Error::InvalidGeometry(
            "axis must be a nonzero vector of length N".into(),
        ));
    }
    Ok(a.iter().map(|v| v / n).collect())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn cyl_radius(x: &[f64]) -> f64 {
    (x[0] * x[0] + x[1] * x[1]).sqrt()
}

fn cone_level(x: &[f64], half_angle: f64) -> f64 {
    let dim = x.len();
    let rho: f64 = x[..dim - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
    let (s, c) = half_angle.sin_cos();
    rho * c - x[dim - 1] * s
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `a`.
pub(crate) fn complement_basis(a: &[f64]) -> Vec<Vec<f64>> {
    let dim = a.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
    for j in 0..dim {
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        let p = dot(&v, a);
        for (vi, ai) in v.iter_mut().zip(a) {
            *vi -= p * ai;
        }
        for b in &basis {
            let p = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= p * bi;
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > 1e-8 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
        if basis.len() == dim - 1 {
            break;
        }
    }
    basis
}

/// Additive recurrence on the generalized golden ratio.
pub(crate) struct Kronecker {
    alpha: Vec<f64>,
    n: u64,
}

impl Kronecker {
    pub(crate) fn new(dim: usize) -> Self {
        let d = dim.max(1);
        // phi_d solves x^{d+1} = x + 1
        let mut phi = 2.0f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
        }
        let alpha = (1..=d)
            .map(|j| (1.0 / phi.powi(j as i32)).fract())
            .collect();
        Self { alpha, n: 0 }
    }

    pub(crate) fn next_point(&mut self) -> Vec<f64> {
        self.n += 1;
        let n = self.n as f64;
        self.alpha.iter().map(|a| (0.5 + a * n).fract()).collect()
    }
}

/// `nu_l` growing linearly with `|l|` away from layer 0, the ordering under
/// which both built-in families satisfy the interface sign condition.
pub fn outward_increasing_nus(index_set: &LayerIndexSet, nu0: f64, step: f64) -> Vec<f64> {
    index_set
        .layers()
        .map(|l| nu0 + step * l.unsigned_abs() as f64)
        .collect()
}

/// Number of deterministic sample points per interface.
pub const INTERFACE_SAMPLES: usize = 1024;

fn check_nus(p: &LayeredPartition, nus: &[f64]) -> Result<()> {
    if p.layer_count() == 0 {
        return Err(Error::EmptyWindow);
    }
    if nus.len() != p.layer_count() {
        return Err(Error::InvalidMedium(format!(
            "{} values of nu for {} layers",
            nus.len(),
            p.layer_count()
        )));
    }
    if nus.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidMedium(
            "every nu must be positive and finite".into(),
        ));
    }
    Ok(())
}

/// Checks the layered-partition hypotheses on the box `[-half_width, half_width]^N`:
/// covering, finiteness, paired interfaces, bounds of `nu` and the
/// interface sign condition `(nu_l - nu_{l+1}) (n^(l) . x) <= 0`.
pub fn validate_assumption21(
    p: &LayeredPartition,
    nus: &[f64],
    half_width: f64,
) -> Result<CertificateReport> {
    if p.layer_count() == 0 {
        return Err(Error::EmptyWindow);
    }
    let mut entries = Vec::new();

    // covering: every sampled point lies in exactly one layer or on an interface
    let tie = 1e-9 * half_width.max(1.0);
    let mut seq = Kronecker::new(p.dim);
    let mut cover_witness = None;
    let mut outside = None;
    let mut max_multiplicity = 0usize;
    for _ in 0..4096 {
        let x: Vec<f64> = seq
            .next_point()
            .iter()
            .map(|t| (2.0 * t - 1.0) * half_width)
            .collect();
        let count = p.index_set.layers().filter(|&l| p.contains(l, &x)).count();
        max_multiplicity = max_multiplicity.max(count);
        let on_interface = matches!(
            p.classify_point(&x, tie),
            Ok(Classification::InterfaceHit { .. })
        );
        if count > 1 || (count == 0 && !on_interface) {
            cover_witness.get_or_insert(x.clone());
        }
        if let Err(Error::OutOfWindow { .. }) = p.classify_point(&x, tie) {
            outside.get_or_insert(x);
        }
    }
    entries.push(
        Certificate::new("partition_cover", cover_witness.is_none())
            .with_constant("max_multiplicity", max_multiplicity as f64)
            .with_witness(cover_witness),
    );
    entries.push(
        Certificate::new("finite_cover", outside.is_none())
            .with_constant("layers_in_window", p.layer_count() as f64)
            .with_witness(outside),
    );

    // S_l^(+) = S_{l+1}^(-): opposite normals at shared points
    let mut pair_defect: f64 = 0.0;
    let mut pair_witness = None;
    for iface in p.interfaces() {
        for x in iface.locus.sample(p.dim, half_width, 64) {
            let (l, r) = iface.between;
            let tol = 1e-9 * half_width.max(1.0);
            let defect = match (p.outward_normal(l, &x, tol), p.outward_normal(r, &x, tol)) {
                (Ok(a), Ok(b)) => a
                    .iter()
                    .zip(&b)
                    .map(|(u, v)| (u + v).abs())
                    .fold(0.0, f64::max),
                _ => f64::INFINITY,
            };
            if defect > pair_defect {
                pair_defect = defect;
                if defect > 1e-12 {
                    pair_witness = Some(x.clone());
                }
            }
        }
    }
    entries.push(
        Certificate::new("interface_pairing", pair_witness.is_none())
            .with_constant("max_normal_defect", pair_defect)
            .with_witness(pair_witness),
    );

    let bounds_ok = check_nus(p, nus).is_ok();
    let (m0, big_m0) = if bounds_ok {
        (
            nus.iter().copied().fold(f64::INFINITY, f64::min),
            nus.iter().copied().fold(0.0, f64::max),
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    entries.push(
        Certificate::new("coefficient_bounds", bounds_ok)
            .with_constant("m0", m0)
            .with_constant("M0", big_m0),
    );

    if bounds_ok {
        for iface in p.interfaces() {
            let (l, r) = iface.between;
            let nu_l = nus[p.index_set.position(l).expect("window layer")];
            let nu_r = nus[p.index_set.position(r).expect("window layer")];
            let samples = iface.locus.sample(p.dim, half_width, INTERFACE_SAMPLES);
            let mut worst = f64::NEG_INFINITY;
            let mut witness = None;
            for x in &samples {
                let n = iface.locus.normal(x);
                let value = (nu_l - nu_r) * dot(&n, x);
                if value > worst {
                    worst = value;
                    witness = Some(x.clone());
                }
            }
            let scale = nu_l.max(nu_r) * half_width.max(1.0);
            let pass = samples.is_empty() || worst <= 1e-13 * scale;
            entries.push(
                Certificate::new(format!("interface_sign[{l}]"), pass)
                    .with_constant("max_value", if samples.is_empty() { 0.0 } else { worst })
                    .with_constant("samples", samples.len() as f64)
                    .with_witness(if pass { None } else { witness }),
            );
        }
    }
    Ok(CertificateReport::new("layered_partition", entries))
}

fn two_region_interface(p: &LayeredPartition) -> Result<Interface> {
    if p.layer_count() != 2 {
        return Err(Error::WrongArity(p.layer_count()));
    }
    p.interfaces()
        .into_iter()
        .next()
        .ok_or(Error::WrongArity(p.layer_count()))
}

/// Cone-type interface conditions `|n_N| >= c_1` and `|x . n| <= c_2` on a
/// sample of the single interface; reports the best constants found.
pub fn check_eidus(p: &LayeredPartition, half_width: f64) -> Result<CertificateReport> {
    let iface = two_region_interface(p)?;
    let samples = iface.locus.sample(p.dim, half_width, INTERFACE_SAMPLES);
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    let mut witness = None;
    for x in &samples {
        let n = iface.locus.normal(x);
        let nn = n[p.dim - 1].abs();
        if nn < c1 {
            c1 = nn;
            witness = Some(x.clone());
        }
        c2 = c2.max(dot(&n, x).abs());
    }
    let pass = c1 > 1e-12;
    Ok(CertificateReport::new(
        "cone_conditions",
        vec![Certificate::new("normal_component_bound", pass)
            .with_constant("c1", c1)
            .with_constant("c2", c2)
            .with_witness(if pass { None } else { witness })],
    ))
}

/// Two-region condition `(mu_02 - mu_01)(x . n^(1)) >= 0`, with `n^(1)` the
/// outward normal of the first region.
pub fn check_cylindrical(
    p: &LayeredPartition,
    nus: &[f64],
    half_width: f64,
) -> Result<CertificateReport> {
    let iface = two_region_interface(p)?;
    check_nus(p, nus)?;
    let samples = iface.locus.sample(p.dim, half_width, INTERFACE_SAMPLES);
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for x in &samples {
        let value = (nus[1] - nus[0]) * dot(&iface.locus.normal(x), x);
        if value < worst {
            worst = value;
            witness = Some(x.clone());
        }
    }
    let scale = nus[0].max(nus[1]) * half_width.max(1.0);
    let pass = samples.is_empty() || worst >= -1e-13 * scale;
    Ok(CertificateReport::new(
        "cylindrical_condition",
        vec![Certificate::new("interface_sign", pass)
            .with_constant("min_value", if samples.is_empty() { 0.0 } else { worst })
            .with_witness(if pass { None } else { witness })],
    ))
}
