//! Truncated grids and the discrete operator `-mu^{-1} Delta_h - z`.

pub mod grid;

pub use grid::{build_grid, Grid, Region, Sponge};
pub mod line;
pub mod operator;

pub use line::{LineOperator, Tridiagonal};
pub use operator::{
    assemble, laplacian_h, wavenumber_scalar, DiscreteOperator, GridFunction, Side,
};
