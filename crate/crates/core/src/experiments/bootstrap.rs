use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::{bootstrap_exponents, spectral_lower_bound, BootstrapExponents, RangeKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub j: u64,
    /// Weight `-delta + j step`.
    pub weight: f64,
    /// `1 - delta + (j+1) step`; must lie in `(1/2, 3/2)` for `j < j0`.
    pub window_exponent: Option<f64>,
    pub window_ok: bool,
    /// `||u||_{weight(j+1)} / ||u||_{weight(j)}` when both samples exist.
    pub ratio: Option<f64>,
    /// `sqrt(lambda) c1 ratio`.
    pub scaled: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapChain {
    pub exponents: BootstrapExponents,
    pub links: Vec<ChainLink>,
    /// Every window exponent lies in `(1/2, 3/2)`.
    pub arithmetic_ok: bool,
    /// `||u||_{delta0} / ||u||_{-delta}`.
    pub global_ratio: Option<f64>,
    /// Every chain ratio is finite and at most the global ratio.
    pub ratios_bounded: Option<bool>,
    /// Point-spectrum lower bound implied by the global ratio.
    pub spectral_bound: Option<f64>,
}

/// Exponent bookkeeping of the weight-raising chain, plus the measured
/// chain ratios from `norm_samples` (index `j` to `||u||_{-delta + j step}`).
/// Only the arithmetic is asserted; the ratios are reported.
pub fn bootstrap_check(
    delta: f64,
    epsilon: f64,
    kind: RangeKind,
    lambda: f64,
    c1: f64,
    norm_samples: &BTreeMap<u64, f64>,
) -> Result<BootstrapChain> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument("lambda must be positive".into()));
    }
    let ex = bootstrap_exponents(delta, epsilon, kind)?;
    let mut links = Vec::with_capacity(ex.j0 as usize + 1);
    for j in 0..=ex.j0 {
        let window_exponent = (j < ex.j0).then(|| 1.0 - delta + (j + 1) as f64 * ex.step);
        let window_ok = window_exponent.is_none_or(|w| w > 0.5 && w < 1.5);
        let ratio = match (norm_samples.get(&j), norm_samples.get(&(j + 1))) {
            (Some(&a), Some(&b)) if j < ex.j0 && a > 0.0 => Some(b / a),
            _ => None,
        };
        links.push(ChainLink {
            j,
            weight: -delta + j as f64 * ex.step,
            window_exponent,
            window_ok,
            ratio,
            scaled: ratio.map(|q| lambda.sqrt() * c1 * q),
        });
    }
    let arithmetic_ok = links.iter().all(|l| l.window_ok);
    let global_ratio = match (norm_samples.get(&0), norm_samples.get(&ex.j0)) {
        (Some(&a), Some(&b)) if a > 0.0 => Some(b / a),
        _ => None,
    };
    let measured: Vec<f64> = links.iter().filter_map(|l| l.ratio).collect();
    let ratios_bounded = global_ratio.filter(|_| !measured.is_empty()).map(|g| {
        measured
            .iter()
            .all(|q| q.is_finite() && *q <= g * (1.0 + 1e-12))
    });
    let spectral_bound = global_ratio
        .filter(|g| *g > 0.0 && c1 > 0.0)
        .map(|g| spectral_lower_bound(c1, ex.j0, g));
    Ok(BootstrapChain {
        exponents: ex,
        links,
        arithmetic_ok,
        global_ratio,
        ratios_bounded,
        spectral_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_range_chain() {
        let c =
            bootstrap_check(0.6, 0.25, RangeKind::ShortRange, 1.0, 1.0, &BTreeMap::new()).unwrap();
        let w: Vec<f64> = c.links.iter().map(|l| l.weight).collect();
        for (a, b) in w.iter().zip([-0.6, -0.35, -0.1, 0.15]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(c.arithmetic_ok);
        assert_eq!(c.global_ratio, None);
    }

    #[test]
    fn ratios_from_samples() {
        let samples: BTreeMap<u64, f64> = [(0, 1.0), (1, 1.5), (2, 2.0), (3, 3.0)]
            .into_iter()
            .collect();
        let c = bootstrap_check(0.6, 0.25, RangeKind::ShortRange, 4.0, 0.5, &samples).unwrap();
        assert_eq!(c.global_ratio, Some(3.0));
        assert_eq!(c.links[0].ratio, Some(1.5));
        assert_eq!(c.links[0].scaled, Some(1.5));
        assert_eq!(c.ratios_bounded, Some(true));
    }

    #[test]
    fn delta_out_of_range() {
        let e = bootstrap_check(0.9, 0.25, RangeKind::ShortRange, 1.0, 1.0, &BTreeMap::new());
        assert!(matches!(e, Err(Error::DeltaOutOfRange { .. })));
    }
}
