//! Normalized solutions of the Schrödinger–Poisson equation
//!
//! ```text
//! -Δu + V u + λ u + (|x|^{-1} * u²) u = |u|^{p-2} u,   ‖u‖₂ = a,   10/3 < p < 6
//! ```
//!
//! on radially symmetric grids and on Dirichlet boxes. The crate provides the
//! discrete energy, the Coulomb term, external potentials with their
//! admissibility checks, a ground-state/continuation solver and diagnostics.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coulomb;
pub mod energy;
mod error;
pub mod mesh;
pub mod potentials;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use mesh::{BoxGrid, Field, Grid, Mesh, RadialGrid};

pub use energy::{EnergyBreakdown, ProblemParams};
pub use potentials::PotentialSpec;
pub use solver::Solution;
