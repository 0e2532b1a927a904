//! Grids, fields and the discrete operators built on them.
//!
//! Radial fields are discretized through `w = r u` with a three-point
//! second difference, which makes `grad_sq` the exact quadratic form of
//! `apply_laplacian`. Boxes are cell centred with Dirichlet faces.

mod field;
mod grid;
mod ops;
pub mod spsf;

pub use field::{Field, Mesh};
pub use grid::{make_box_grid, make_radial_grid, BoxBoundary, BoxGrid, Grid, RadialGrid};
pub use ops::{apply_laplacian, grad_sq, integrate, lp_norm, resample_dilated, rescale, tail_mass_fraction};
pub(crate) use ops::{grad_sq_values, laplacian_into, power_integral};
