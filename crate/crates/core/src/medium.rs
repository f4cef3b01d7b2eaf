//! The coefficient `mu = mu_0 + mu_1`: a layerwise constant part and a
//! decaying perturbation, with nodewise hypothesis checks and the
//! bootstrap exponent arithmetic.

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, CertificateReport};
use crate::discretization::grid::Grid;
use crate::error::{Error, Result};
use crate::geometry::{Classification, LayeredPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeKind {
    ShortRange,
    LongRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Profile {
    /// `c1 (1+r)^{-1-eps}` (short range) or `c1 (1+r)^{-eps}` (long range).
    PowerDecay,
    /// `c1 exp(-|x - center|^2 / width^2)`.
    GaussianBump { center: Vec<f64>, width: f64 },
    /// Piecewise linear radial table, constant beyond the last radius.
    Custom { radii: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub kind: RangeKind,
    pub c1: f64,
    pub epsilon: f64,
    pub profile: Profile,
    #[serde(default = "one")]
    pub sign: f64,
}

fn one() -> f64 {
    1.0
}

impl Perturbation {
    pub fn new(
        kind: RangeKind,
        c1: f64,
        epsilon: f64,
        profile: Profile,
        sign: f64,
    ) -> Result<Self> {
        let p = Self {
            kind,
            c1,
            epsilon,
            profile,
            sign,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.c1 > 0.0) || !self.c1.is_finite() {
            return Err(Error::InvalidMedium(format!(
                "c1 = {} must be positive",
                self.c1
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidMedium(format!(
                "epsilon = {} must lie in (0, 1/2)",
                self.epsilon
            )));
        }
        if self.sign != 1.0 && self.sign != -1.0 {
            return Err(Error::InvalidMedium("sign must be +1 or -1".into()));
        }
        match &self.profile {
            Profile::PowerDecay => {}
            Profile::GaussianBump { width, .. } if !(*width > 0.0) => {
                return Err(Error::InvalidMedium("bump width must be positive".into()))
            }
            Profile::GaussianBump { .. } => {}
            Profile::Custom { radii, values } => {
                if radii.is_empty()
                    || radii.len() != values.len()
                    || radii.windows(2).any(|w| w[0] >= w[1])
                    || radii[0] < 0.0
                {
                    return Err(Error::InvalidMedium(
                        "custom table needs matching, increasing, nonnegative radii".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Decay exponent of the value envelope.
    fn value_exponent(&self) -> f64 {
        match self.kind {
            RangeKind::ShortRange => 1.0 + self.epsilon,
            RangeKind::LongRange => self.epsilon,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        self.sign
            * match &self.profile {
                Profile::PowerDecay => self.c1 * (1.0 + r).powf(-self.value_exponent()),
                Profile::GaussianBump { center, width } => {
                    self.c1 * (-dist2(x, center) / (width * width)).exp()
                }
                Profile::Custom { radii, values } => table(radii, values, r),
            }
    }

    /// Analytic gradient; `None` for tabulated profiles.
    pub fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let r = norm(x);
        match &self.profile {
            Profile::PowerDecay => {
                let e = self.value_exponent();
                let d = -self.sign * self.c1 * e * (1.0 + r).powf(-e - 1.0);
                Some(if r > 0.0 {
                    x.iter().map(|v| d * v / r).collect()
                } else {
                    vec![0.0; x.len()]
                })
            }
            Profile::GaussianBump { center, width } => {
                let v = self.value(x);
                Some(
                    x.iter()
                        .zip(center)
                        .map(|(a, c)| -2.0 * (a - c) / (width * width) * v)
                        .collect(),
                )
            }
            Profile::Custom { .. } => None,
        }
    }

    /// Central-difference gradient with step `step`.
    pub fn gradient_fd(&self, x: &[f64], step: f64) -> Vec<f64> {
        let mut y = x.to_vec();
        (0..x.len())
            .map(|j| {
                y[j] = x[j] + step;
                let p = self.value(&y);
                y[j] = x[j] - step;
                let m = self.value(&y);
                y[j] = x[j];
                (p - m) / (2.0 * step)
            })
            .collect()
    }

    /// `r d(mu_1)/dr`, analytic; `None` for tabulated profiles.
    pub fn r_radial_derivative(&self, x: &[f64]) -> Option<f64> {
        self.gradient(x)
            .map(|g| g.iter().zip(x).map(|(a, b)| a * b).sum())
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist2(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn table(radii: &[f64], values: &[f64], r: f64) -> f64 {
    if r <= radii[0] {
        return values[0];
    }
    for i in 1..radii.len() {
        if r <= radii[i] {
            let t = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
            return values[i - 1] + t * (values[i] - values[i - 1]);
        }
    }
    values[values.len() - 1]
}

/// `(mu_0, mu_1, mu)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuTriple {
    pub mu0: f64,
    pub mu1: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumProfile {
    pub partition: LayeredPartition,
    pub nus: Vec<f64>,
    pub perturbation: Option<Perturbation>,
    pub m0: f64,
    pub big_m0: f64,
}

impl MediumProfile {
    pub fn new(
        partition: LayeredPartition,
        nus: Vec<f64>,
        perturbation: Option<Perturbation>,
    ) -> Result<Self> {
        if partition.layer_count() == 0 {
            return Err(Error::EmptyWindow);
        }
        if nus.len() != partition.layer_count() {
            return Err(Error::InvalidMedium(format!(
                "{} values of nu for {} layers",
                nus.len(),
                partition.layer_count()
            )));
        }
        if nus.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidMedium(
                "every nu must be positive and finite".into(),
            ));
        }
        if let Some(p) = &perturbation {
            p.check()?;
        }
        let m0 = nus.iter().copied().fold(f64::INFINITY, f64::min);
        let big_m0 = nus.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            partition,
            nus,
            perturbation,
            m0,
            big_m0,
        })
    }

    /// Single-layer medium filling the whole space.
    pub fn homogeneous(dim: usize, nu: f64) -> Result<Self> {
        let p = LayeredPartition::planar_stack(dim, vec![], None, None)?;
        Self::new(p, vec![nu], None)
    }

    pub fn dim(&self) -> usize {
        self.partition.dim
    }

    pub fn nu(&self, layer: i64) -> f64 {
        let (lo, hi) = self.partition.window();
        self.nus[(layer.clamp(lo, hi) - lo) as usize]
    }

    /// `mu_0` at `x`; points on an interface (within `tie_tol`) take the mean
    /// of the two adjacent values. Layers beyond the window repeat the
    /// outermost value.
    pub fn mu0_at(&self, x: &[f64], tie_tol: f64) -> f64 {
        match self.partition.classify_point(x, tie_tol) {
            Ok(Classification::Layer(l)) => self.nu(l),
            Ok(Classification::InterfaceHit { lower }) => {
                0.5 * (self.nu(lower) + self.nu(lower + 1))
            }
            Err(Error::OutOfWindow { layer, .. }) => self.nu(layer),
            Err(_) => unreachable!("classification only fails outside the window"),
        }
    }

    pub fn mu1_at(&self, x: &[f64]) -> f64 {
        self.perturbation.as_ref().map_or(0.0, |p| p.value(x))
    }

    pub fn mu_at(&self, x: &[f64], tie_tol: f64) -> Result<MuTriple> {
        let mu0 = self.mu0_at(x, tie_tol);
        let mu1 = self.mu1_at(x);
        let mu = mu0 + mu1;
        if !(mu > 0.0) {
            return Err(Error::NonPositiveMedium {
                point: x.to_vec(),
                mu,
            });
        }
        Ok(MuTriple { mu0, mu1, mu })
    }

    /// `mu_0` at every grid node with the default tie tolerance `h/2`.
    pub fn mu0_nodes(&self, grid: &Grid) -> Vec<f64> {
        let tie = grid.h / 2.0;
        let mut x = vec![0.0; grid.dim];
        (0..grid.node_count())
            .map(|i| {
                grid.coords(i, &mut x);
                self.mu0_at(&x, tie)
            })
            .collect()
    }

    /// `mu` at every grid node; fails on the first nonpositive value.
    pub fn mu_nodes(&self, grid: &Grid) -> Result<Vec<f64>> {
        let tie = grid.h / 2.0;
        let mut x = vec![0.0; grid.dim];
        (0..grid.node_count())
            .map(|i| {
                grid.coords(i, &mut x);
                self.mu_at(&x, tie).map(|t| t.mu)
            })
            .collect()
    }
}

/// Positivity and boundedness of `mu` and the decay envelopes of `mu_1`,
/// nodewise on the grid.
pub fn validate_assumption22(m: &MediumProfile, grid: &Grid) -> CertificateReport {
    let tie = grid.h / 2.0;
    let mut x = vec![0.0; grid.dim];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut lo_at = None;
    for i in 0..grid.node_count() {
        grid.coords(i, &mut x);
        let mu = m.mu0_at(&x, tie) + m.mu1_at(&x);
        if mu < lo {
            lo = mu;
            lo_at = Some(x.clone());
        }
        hi = hi.max(mu);
    }
    let positive = lo > 0.0 && hi.is_finite();
    let mut entries = vec![Certificate::new("mu_bounds", positive)
        .with_constant("m0_tilde", lo)
        .with_constant("M0_tilde", hi)
        .with_witness(if positive { None } else { lo_at })];

    if let Some(p) = &m.perturbation {
        let e = p.value_exponent();
        let (value_c, value_at) =
            max_over_nodes(grid, |x| p.value(x).abs() * (1.0 + norm(x)).powf(e));
        let value_ok = value_c <= p.c1 * (1.0 + 1e-12);
        entries.push(
            Certificate::new("decay_envelope", value_ok)
                .with_constant("c1", p.c1)
                .with_constant("achieved", value_c)
                .with_witness(if value_ok { None } else { value_at }),
        );
        if p.kind == RangeKind::LongRange {
            let (grad_c, grad_at) = max_over_nodes(grid, |x| {
                let g = p.gradient(x).unwrap_or_else(|| p.gradient_fd(x, grid.h));
                norm(&g) * (1.0 + norm(x)).powf(1.0 + p.epsilon)
            });
            let grad_ok = grad_c <= p.c1 * (1.0 + 1e-12);
            entries.push(
                Certificate::new("gradient_envelope", grad_ok)
                    .with_constant("c1", p.c1)
                    .with_constant("achieved", grad_c)
                    .with_witness(if grad_ok { None } else { grad_at }),
            );
        }
    }
    CertificateReport::new("medium_bounds", entries)
}

fn max_over_nodes(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> (f64, Option<Vec<f64>>) {
    let mut x = vec![0.0; grid.dim];
    let mut best = f64::NEG_INFINITY;
    let mut at = None;
    for i in 0..grid.node_count() {
        grid.coords(i, &mut x);
        let v = f(&x);
        if v > best {
            best = v;
            at = Some(x.clone());
        }
    }
    (best, at)
}

fn min_over_nodes(grid: &Grid, mut f: impl FnMut(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let mut x = vec![0.0; grid.dim];
    let mut best = f64::INFINITY;
    let mut at = vec![0.0; grid.dim];
    for i in 0..grid.node_count() {
        grid.coords(i, &mut x);
        let v = f(&x);
        if v < best {
            best = v;
            at.copy_from_slice(&x);
        }
    }
    (best, at)
}

/// Margin of `mu >= N mu_1 + lambda0 (|x| |mu_1|)^2`, nodewise.
pub fn check_assumption47_i(m: &MediumProfile, lambda0: f64, grid: &Grid) -> Certificate {
    let n = grid.dim as f64;
    let tie = grid.h / 2.0;
    let (margin, at) = min_over_nodes(grid, |x| {
        let mu1 = m.mu1_at(x);
        let mu = m.mu0_at(x, tie) + mu1;
        let rm = norm(x) * mu1.abs();
        mu - n * mu1 - lambda0 * rm * rm
    });
    let pass = margin >= 0.0;
    Certificate::new("virial_bound", pass)
        .with_constant("lambda0", lambda0)
        .with_constant("min_margin", margin)
        .with_witness(Some(at))
}

/// Margin of `mu + |x| d(mu_1)/d|x| >= 0`, nodewise with the analytic radial
/// derivative.
pub fn check_assumption47_ii(m: &MediumProfile, grid: &Grid) -> Result<Certificate> {
    if let Some(p) = &m.perturbation {
        if p.gradient(&vec![0.0; grid.dim]).is_none() {
            return Err(Error::NotDifferentiable);
        }
    }
    let tie = grid.h / 2.0;
    let (margin, at) = min_over_nodes(grid, |x| {
        let radial = m
            .perturbation
            .as_ref()
            .and_then(|p| p.r_radial_derivative(x))
            .unwrap_or(0.0);
        m.mu0_at(x, tie) + m.mu1_at(x) + radial
    });
    Ok(Certificate::new("radial_monotonicity", margin >= 0.0)
        .with_constant("min_margin", margin)
        .with_witness(Some(at)))
}

/// Both conditions for absence of eigenvalues, with the implied conclusion.
pub fn check_assumption47(
    m: &MediumProfile,
    lambda0: f64,
    grid: &Grid,
) -> Result<CertificateReport> {
    let first = check_assumption47_i(m, lambda0, grid);
    let second = check_assumption47_ii(m, grid)?;
    let mut conclusions = Vec::new();
    if first.pass {
        conclusions.push(format!("no eigenvalues in [0, {lambda0}]"));
    }
    if second.pass {
        conclusions.push("no eigenvalues".to_string());
    }
    let mut report = CertificateReport::new("eigenvalue_absence", vec![first, second]);
    // either condition alone suffices
    report.pass = report.entries.iter().any(|c| c.pass);
    report.conclusions = conclusions;
    Ok(report)
}

/// Result of the bootstrap exponent arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapExponents {
    pub delta: f64,
    pub epsilon: f64,
    /// Step of the chain: `epsilon` (short range) or `epsilon / 2`.
    pub step: f64,
    pub eps_prime: Option<f64>,
    pub j0: u64,
    pub delta0: f64,
    /// Admissible `delta` range for perturbed limiting absorption runs,
    /// `(1/2, 1/2 + epsilon/4]`.
    pub admissible: (f64, f64),
}

/// Exact rational `num / den` recovered from a decimal input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Rational {
    pub num: i128,
    pub den: i128,
}

impl Rational {
    /// Best continued-fraction approximation with denominator `<= 1e9`
    /// within `1e-12` relative; exact for short decimals.
    pub(crate) fn from_f64(x: f64) -> Self {
        let (mut h0, mut h1) = (0i128, 1i128);
        let (mut k0, mut k1) = (1i128, 0i128);
        let mut rest = x;
        for _ in 0..64 {
            let a = rest.floor();
            let ai = a as i128;
            let h2 = ai * h1 + h0;
            let k2 = ai * k1 + k0;
            if k2 > 1_000_000_000 {
                break;
            }
            (h0, h1, k0, k1) = (h1, h2, k1, k2);
            let approx = h1 as f64 / k1 as f64;
            if (approx - x).abs() <= 1e-12 * x.abs().max(1e-300) {
                break;
            }
            let frac = rest - a;
            if frac == 0.0 {
                break;
            }
            rest = 1.0 / frac;
        }
        Self { num: h1, den: k1 }
    }
}

/// `j0 = min { j : -delta + j step > 0 }` and `delta0 = -delta + j0 step`,
/// in exact rational arithmetic.
pub fn bootstrap_exponents(
    delta: f64,
    epsilon: f64,
    kind: RangeKind,
) -> Result<BootstrapExponents> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidMedium(format!(
            "epsilon = {epsilon} must lie in (0, 1/2)"
        )));
    }
    let hi = match kind {
        RangeKind::ShortRange => 0.5 + epsilon,
        RangeKind::LongRange => 0.5 * (1.0 + epsilon),
    };
    let d = Rational::from_f64(delta);
    let e = Rational::from_f64(epsilon);
    // compare exactly: 1/2 < delta < hi
    let lower_ok = 2 * d.num > d.den;
    let upper_ok = match kind {
        // delta < 1/2 + e  <=>  2 d.num e.den < d.den (e.den + 2 e.num)
        RangeKind::ShortRange => 2 * d.num * e.den < d.den * (e.den + 2 * e.num),
        // delta < (1 + e)/2  <=>  2 d.num e.den < d.den (e.den + e.num)
        RangeKind::LongRange => 2 * d.num * e.den < d.den * (e.den + e.num),
    };
    if !lower_ok || !upper_ok {
        return Err(Error::DeltaOutOfRange { delta, lo: 0.5, hi });
    }
    // step = s.num / s.den
    let s = match kind {
        RangeKind::ShortRange => e,
        RangeKind::LongRange => Rational {
            num: e.num,
            den: 2 * e.den,
        },
    };
    // delta / step = d.num s.den / (d.den s.num) > 0
    let q = (d.num * s.den).div_euclid(d.den * s.num);
    let j0 = q + 1;
    let d0 = Rational {
        num: j0 * s.num * d.den - d.num * s.den,
        den: s.den * d.den,
    };
    let step = s.num as f64 / s.den as f64;
    Ok(BootstrapExponents {
        delta,
        epsilon,
        step,
        eps_prime: (kind == RangeKind::LongRange).then_some(step),
        j0: j0 as u64,
        delta0: d0.num as f64 / d0.den as f64,
        admissible: (0.5, 0.5 + epsilon / 4.0),
    })
}

/// Lower bound `c1^{-2} C^{-2/j0}` of the point spectrum for a supplied
/// constant `C`.
pub fn spectral_lower_bound(c1: f64, j0: u64, c_measured: f64) -> f64 {
    c1.powi(-2) * c_measured.powf(-2.0 / j0 as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::grid::build_grid;
    use crate::geometry::outward_increasing_nus;

    fn planar() -> MediumProfile {
        let p = LayeredPartition::planar_stack(2, vec![-1.0, 1.0], None, None).unwrap();
        let nus = outward_increasing_nus(&p.index_set, 1.0, 1.0);
        MediumProfile::new(p, nus, None).unwrap()
    }

    #[test]
    fn mu_at_examples() {
        let m = planar();
        let t = m.mu_at(&[0.0, 0.0], 0.0).unwrap();
        assert_eq!((t.mu0, t.mu1, t.mu), (1.0, 0.0, 1.0));
        assert_eq!(m.mu0_at(&[0.0, 1.0], 0.125), 1.5);

        let p = LayeredPartition::planar_stack(3, vec![-1.0, 1.0], None, None).unwrap();
        let pert =
            Perturbation::new(RangeKind::ShortRange, 0.1, 0.25, Profile::PowerDecay, 1.0).unwrap();
        let m = MediumProfile::new(p.clone(), vec![2.0, 2.0, 2.0], Some(pert)).unwrap();
        let t = m.mu_at(&[1.0, 0.0, 0.0], 0.0).unwrap();
        assert!((t.mu1 - 0.1 * 2f64.powf(-1.25)).abs() < 1e-15);
        assert!((t.mu1 - 0.04204).abs() < 1e-5);
        assert!((t.mu - 2.04204).abs() < 1e-5);

        let pert = Perturbation::new(RangeKind::ShortRange, 10.0, 0.25, Profile::PowerDecay, -1.0)
            .unwrap();
        let m = MediumProfile::new(p, vec![1.0; 3], Some(pert)).unwrap();
        assert!(matches!(
            m.mu_at(&[0.0; 3], 0.0),
            Err(Error::NonPositiveMedium { .. })
        ));
    }

    #[test]
    fn assumption22_examples() {
        let g = build_grid(2, 4.0, 0.25, None).unwrap();
        let m = planar();
        let r = validate_assumption22(&m, &g);
        assert!(r.pass);
        let c = &r.entries[0].constants;
        assert_eq!((c["m0_tilde"], c["M0_tilde"]), (m.m0, m.big_m0));

        let pert =
            Perturbation::new(RangeKind::ShortRange, 0.3, 0.2, Profile::PowerDecay, -1.0).unwrap();
        let m2 = MediumProfile::new(m.partition.clone(), m.nus.clone(), Some(pert)).unwrap();
        let r = validate_assumption22(&m2, &g);
        assert!(r.pass);
        assert!(r.entries[1].constants["achieved"] <= 0.3 * (1.0 + 1e-12));

        // a jump in a long-range table breaks the gradient envelope
        let jump = Profile::Custom {
            radii: vec![0.0, 2.0, 2.01, 10.0],
            values: vec![0.1, 0.1, 0.0, 0.0],
        };
        let pert = Perturbation::new(RangeKind::LongRange, 0.2, 0.2, jump, 1.0).unwrap();
        let m3 = MediumProfile::new(m.partition.clone(), m.nus.clone(), Some(pert)).unwrap();
        let r = validate_assumption22(&m3, &g);
        assert!(!r.pass);
        let e = r.entry("gradient_envelope").unwrap();
        let w = e.witness.as_ref().unwrap();
        assert!((norm(w) - 2.0).abs() < 0.5);
    }

    #[test]
    fn assumption47_examples() {
        let g = build_grid(3, 8.0, 0.5, None).unwrap();
        let m = MediumProfile::homogeneous(3, 1.0).unwrap();
        let r = check_assumption47(&m, 100.0, &g).unwrap();
        assert!(r.entries.iter().all(|c| c.pass));
        assert_eq!(r.entries[0].constants["min_margin"], 1.0);

        // attractive long-range tail, c <= m0/2
        let pert =
            Perturbation::new(RangeKind::LongRange, 0.5, 0.3, Profile::PowerDecay, 1.0).unwrap();
        let m = MediumProfile::new(m.partition.clone(), vec![1.0], Some(pert.clone())).unwrap();
        let second = check_assumption47_ii(&m, &g).unwrap();
        assert!(second.pass);
        // brute-force margin over a fine radial sweep
        let mut oracle = f64::INFINITY;
        for i in 0..=4000 {
            let r = i as f64 * 0.0035;
            let v = 1.0 + 0.5 * (1.0 + r).powf(-0.3) - 0.5 * 0.3 * r * (1.0 + r).powf(-1.3);
            oracle = oracle.min(v);
        }
        assert!(second.constants["min_margin"] >= oracle - 1e-12);

        // saturating short-range bump near r = 5 with large lambda0
        let bump = Profile::GaussianBump {
            center: vec![5.0, 0.0, 0.0],
            width: 0.5,
        };
        let pert = Perturbation::new(RangeKind::ShortRange, 0.2, 0.25, bump, 1.0).unwrap();
        let m = MediumProfile::new(m.partition.clone(), vec![1.0], Some(pert)).unwrap();
        let first = check_assumption47_i(&m, 10.0, &g);
        assert!(!first.pass);
        let w = first.witness.unwrap();
        assert!((norm(&w) - 5.0).abs() <= 0.75);

        let tab = Profile::Custom {
            radii: vec![0.0, 1.0],
            values: vec![0.1, 0.0],
        };
        let pert = Perturbation::new(RangeKind::ShortRange, 0.2, 0.25, tab, 1.0).unwrap();
        let m = MediumProfile::new(m.partition.clone(), vec![1.0], Some(pert)).unwrap();
        assert_eq!(
            check_assumption47(&m, 1.0, &g),
            Err(Error::NotDifferentiable)
        );
    }

    #[test]
    fn bootstrap_examples() {
        let b = bootstrap_exponents(0.6, 0.25, RangeKind::ShortRange).unwrap();
        assert_eq!(b.j0, 3);
        assert!((b.delta0 - 0.15).abs() < 1e-15);
        let b = bootstrap_exponents(0.6, 0.4, RangeKind::LongRange).unwrap();
        assert_eq!(b.j0, 4);
        assert!((b.delta0 - 0.2).abs() < 1e-15);
        assert!(matches!(
            bootstrap_exponents(0.9, 0.25, RangeKind::ShortRange),
            Err(Error::DeltaOutOfRange { .. })
        ));
        assert_eq!(b.admissible, (0.5, 0.6));
    }

    #[test]
    fn spectral_bound_examples() {
        assert_eq!(spectral_lower_bound(1.0, 1, 1.0), 1.0);
        assert!((spectral_lower_bound(2.0, 2, 4.0) - 0.0625).abs() < 1e-15);
        assert!((spectral_lower_bound(0.5, 3, 8.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rationals_from_decimals() {
        assert_eq!(Rational::from_f64(0.6), Rational { num: 3, den: 5 });
        assert_eq!(Rational::from_f64(0.125), Rational { num: 1, den: 8 });
        assert_eq!(
            Rational::from_f64(0.333),
            Rational {
                num: 333,
                den: 1000
            }
        );
    }
}
