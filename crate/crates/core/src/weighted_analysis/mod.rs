//! Weighted norms, the wavenumber field, radiation operators, the weights
//! `xi`, the energy identity on shells and surface flux probes.

mod flux;
mod identity;
mod norms;
mod quadrature;
mod radiation;
mod xi;

pub use flux::{flux_probe, FluxReport, FluxRow};
pub use identity::{
    identity_residual, identity_terms, Alpha, AnalyticField, FieldSample, FieldSource, GridInterp,
    IdentityReport, IdentityTerm, Shell,
};
pub use norms::{sobolev_norm, star_norm, weighted_norm};
pub(crate) use norms::{star_sum, weighted_sum};
pub use quadrature::{c_n, QuadPoint};
pub(crate) use radiation::node_gradient;
pub use radiation::{
    radiation_field, wavenumber, wavenumber_on_side, RadiationField, WaveNumberField,
};
pub use xi::{XiKind, XiWeight};

use rayon::prelude::*;

const SUM_CHUNK: usize = 4096;

/// Sum of `f(i)` over `0..n` in a fixed order, independent of the thread
/// count: fixed-size chunks are reduced in parallel and then added in
/// sequence.
pub(crate) fn det_sum(n: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    let chunks = n.div_ceil(SUM_CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * SUM_CHUNK;
            let hi = (lo + SUM_CHUNK).min(n);
            (lo..hi).map(&f).sum::<f64>()
        })
        .collect();
    partial.iter().sum()
}
