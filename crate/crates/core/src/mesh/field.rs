use std::f64::consts::PI;

use super::grid::{BoxGrid, Grid, RadialGrid};
use crate::error::{Error, Result};

/// A grid together with the dilation applied to it.
///
/// Physical coordinates are the grid coordinates divided by `scale`, so the
/// effective spacing is `h / scale`. Dilating a field only touches `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    grid: Grid,
    scale: f64,
}

impl Mesh {
    pub fn new(grid: impl Into<Grid>, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {scale}")));
        }
        Ok(Self { grid: grid.into(), scale })
    }

    pub fn unit(grid: impl Into<Grid>) -> Self {
        Self { grid: grid.into(), scale: 1.0 }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Effective spacing `h / scale`.
    pub fn spacing(&self) -> f64 {
        self.grid.h() / self.scale
    }

    /// Effective extent (outer radius or half width).
    pub fn extent(&self) -> f64 {
        self.grid.extent() / self.scale
    }

    pub fn dilated(&self, t: f64) -> Result<Self> {
        Self::new(self.grid, self.scale * t)
    }

    /// Physical position of node `i`; radial nodes lie on the positive x axis.
    pub fn point(&self, i: usize) -> [f64; 3] {
        match &self.grid {
            Grid::Radial(_) => [self.radius(i), 0.0, 0.0],
            Grid::Box(g) => {
                let n = g.n();
                let (a, rest) = (i / (n * n), i % (n * n));
                let (b, c) = (rest / n, rest % n);
                let s = self.scale;
                [g.coord(a) / s, g.coord(b) / s, g.coord(c) / s]
            }
        }
    }

    /// Physical distance of node `i` from the origin.
    pub fn radius(&self, i: usize) -> f64 {
        match &self.grid {
            Grid::Radial(g) => (i + 1) as f64 * g.h() / self.scale,
            Grid::Box(_) => {
                let p = self.point(i);
                (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
            }
        }
    }

    /// Quadrature weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        match &self.grid {
            Grid::Radial(_) => {
                let r = (i + 1) as f64 * h;
                4.0 * PI * r * r * h
            }
            Grid::Box(_) => h * h * h,
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.radius(i)).collect()
    }

    pub fn radial_grid(&self) -> Option<&RadialGrid> {
        match &self.grid {
            Grid::Radial(g) => Some(g),
            Grid::Box(_) => None,
        }
    }

    pub fn box_grid(&self) -> Option<&BoxGrid> {
        match &self.grid {
            Grid::Box(g) => Some(g),
            Grid::Radial(_) => None,
        }
    }

    /// Weighted inner product `Σ w_i a_i b_i`.
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.grid {
            Grid::Radial(_) => {
                let h = self.spacing();
                let mut acc = 0.0;
                for (i, (x, y)) in a.iter().zip(b).enumerate() {
                    let r = (i + 1) as f64 * h;
                    acc += r * r * x * y;
                }
                4.0 * PI * h * acc
            }
            Grid::Box(_) => {
                let h = self.spacing();
                h * h * h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
            }
        }
    }

    pub fn check_same(&self, other: &Mesh) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        let rel = (self.scale - other.scale).abs() / self.scale;
        if rel > 1e-14 {
            return Err(Error::GridMismatch(format!("scale factors differ ({} vs {})", self.scale, other.scale)));
        }
        Ok(())
    }
}

/// Nodal values on a mesh. Values are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    mesh: Mesh,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: impl Into<Grid>, values: Vec<f64>) -> Result<Self> {
        Self::on_mesh(Mesh::unit(grid), values)
    }

    pub fn on_mesh(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::GridMismatch(format!("expected {} values, got {}", mesh.len(), values.len())));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: Mesh) -> Self {
        Self { values: vec![0.0; mesh.len()], mesh }
    }

    /// Samples `f(|x|)` on a radial grid.
    pub fn from_radial_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mesh = Mesh::unit(*grid);
        let values = (0..mesh.len()).map(|i| f(mesh.radius(i))).collect();
        Self::on_mesh(mesh, values)
    }

    /// Samples `f(x)` at the physical node positions of `mesh`.
    pub fn from_point_fn(mesh: Mesh, f: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        let values = (0..mesh.len()).map(|i| f(mesh.point(i))).collect();
        Self::on_mesh(mesh, values)
    }

    /// Samples a radial profile on any mesh.
    pub fn from_profile(mesh: Mesh, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..mesh.len()).map(|i| f(mesh.radius(i))).collect();
        Self::on_mesh(mesh, values)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn grid(&self) -> &Grid {
        self.mesh.grid()
    }

    pub fn scale_factor(&self) -> f64 {
        self.mesh.scale()
    }

    pub fn spacing(&self) -> f64 {
        self.mesh.spacing()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same mesh, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::on_mesh(self.mesh, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Field) -> Result<Self> {
        self.mesh.check_same(&other.mesh)?;
        self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect())
    }

    /// Weighted inner product.
    pub fn dot(&self, other: &Field) -> Result<f64> {
        self.mesh.check_same(&other.mesh)?;
        Ok(self.mesh.dot(&self.values, &other.values))
    }

    /// `‖u‖₂²`.
    pub fn mass(&self) -> f64 {
        self.mesh.dot(&self.values, &self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
