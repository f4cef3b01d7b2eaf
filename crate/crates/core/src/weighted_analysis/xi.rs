use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radial weight families used in the shell identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum XiKind {
    /// `r` on `[0, 1]`, `2^{-(2 delta - 1)} (1 + r)^{2 delta - 1}` beyond.
    ResolventN3 { delta: f64 },
    /// `r^2 / 2` on `[0, 1]`, `2^{-2 delta} (1 + r)^{2 delta - 1}` beyond.
    ResolventN2 { delta: f64 },
    /// `r`, then `2^{-beta} (1 + r)^beta` up to `r0`, constant afterwards.
    BootstrapN3 { beta: f64, r0: f64 },
    /// `r^2 / 2`, then `2^{-beta-1} (1 + r)^beta` up to `r0`, constant.
    BootstrapN2 { beta: f64, r0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiWeight {
    pub kind: XiKind,
}

impl XiWeight {
    /// Checks `delta in (1/2, 1]`, `beta in (0, 2)` and `r0 > 1`, the
    /// ranges on which the weight is nondecreasing with `xi/r - xi'/2 >= 0`.
    pub fn new(kind: XiKind) -> Result<Self> {
        match kind {
            XiKind::ResolventN3 { delta } | XiKind::ResolventN2 { delta } => {
                if !(delta > 0.5 && delta <= 1.0) {
                    return Err(Error::DeltaOutOfRange {
                        delta,
                        lo: 0.5,
                        hi: 1.0,
                    });
                }
            }
            XiKind::BootstrapN3 { beta, r0 } | XiKind::BootstrapN2 { beta, r0 } => {
                if !(beta > 0.0 && beta < 2.0) {
                    return Err(Error::InvalidArgument(format!(
                        "beta = {beta} not in (0, 2)"
                    )));
                }
                if !(r0 > 1.0) || !r0.is_finite() {
                    return Err(Error::InvalidArgument(format!("r0 = {r0} must exceed 1")));
                }
            }
        }
        Ok(Self { kind })
    }

    /// The resolvent weight for dimension `dim`.
    pub fn resolvent(dim: usize, delta: f64) -> Result<Self> {
        Self::new(if dim == 2 {
            XiKind::ResolventN2 { delta }
        } else {
            XiKind::ResolventN3 { delta }
        })
    }

    /// Radii where `xi'` jumps.
    pub fn kinks(&self) -> Vec<f64> {
        match self.kind {
            XiKind::ResolventN3 { .. } | XiKind::ResolventN2 { .. } => vec![1.0],
            XiKind::BootstrapN3 { r0, .. } | XiKind::BootstrapN2 { r0, .. } => vec![1.0, r0],
        }
    }

    fn outer(&self) -> (f64, f64, f64) {
        // xi = scale (1 + min(r, cap))^power for r >= 1
        match self.kind {
            XiKind::ResolventN3 { delta } => (
                2f64.powf(1.0 - 2.0 * delta),
                2.0 * delta - 1.0,
                f64::INFINITY,
            ),
            XiKind::ResolventN2 { delta } => {
                (2f64.powf(-2.0 * delta), 2.0 * delta - 1.0, f64::INFINITY)
            }
            XiKind::BootstrapN3 { beta, r0 } => (2f64.powf(-beta), beta, r0),
            XiKind::BootstrapN2 { beta, r0 } => (2f64.powf(-beta - 1.0), beta, r0),
        }
    }

    fn quadratic_core(&self) -> bool {
        matches!(
            self.kind,
            XiKind::ResolventN2 { .. } | XiKind::BootstrapN2 { .. }
        )
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= 1.0 {
            return if self.quadratic_core() {
                0.5 * r * r
            } else {
                r
            };
        }
        let (scale, power, cap) = self.outer();
        scale * (1.0 + r.min(cap)).powf(power)
    }

    /// Right derivative.
    pub fn derivative(&self, r: f64) -> f64 {
        if r < 1.0 {
            return if self.quadratic_core() { r } else { 1.0 };
        }
        let (scale, power, cap) = self.outer();
        if r >= cap {
            0.0
        } else {
            scale * power * (1.0 + r).powf(power - 1.0)
        }
    }
}
