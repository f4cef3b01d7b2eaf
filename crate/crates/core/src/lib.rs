//! Numerical laboratory for the limiting absorption principle of
//! `H = -mu^{-1} Delta` on layered media.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod cli;
pub mod discretization;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod medium;
pub mod oracle1d;
pub mod solver;
pub mod weighted_analysis;

pub use error::{Error, Result};
