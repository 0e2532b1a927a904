use crate::error::{Error, Result};

/// Uniform radial grid on `(0, r_max)`.
///
/// Nodes sit at `r_i = i h` for `i = 1..n-1`; both ends carry homogeneous
/// Dirichlet data for `w = r u`. The spacing is stored, `r_max` is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    n: usize,
    h: f64,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidGrid(format!("r_max must be positive, got {r_max}")));
        }
        if n < 4 {
            return Err(Error::InvalidGrid(format!("radial grid needs n >= 4, got {n}")));
        }
        Ok(Self { n, h: r_max / n as f64 })
    }

    /// Grid with an explicit spacing, used by the binary reader and the radius leg.
    pub fn from_spacing(h: f64, n: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if n < 4 {
            return Err(Error::InvalidGrid(format!("radial grid needs n >= 4, got {n}")));
        }
        Ok(Self { n, h })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn r_max(&self) -> f64 {
        self.n as f64 * self.h
    }

    /// Number of unknowns (interior nodes).
    pub fn len(&self) -> usize {
        self.n - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same spacing, larger (or smaller) outer radius.
    pub fn resized(&self, r_max: f64) -> Result<Self> {
        let n = (r_max / self.h).round() as usize;
        Self::from_spacing(self.h, n)
    }
}

/// Boundary treatment of a box grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxBoundary {
    /// Homogeneous Dirichlet data on the faces (the physical case).
    Dirichlet,
    /// Periodic wrap, only meant for testing discrete operators.
    Periodic,
}

/// Cell-centred cubic grid on `[-L, L]³` with `n` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGrid {
    n: usize,
    h: f64,
    boundary: BoxBoundary,
}

impl BoxGrid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        Self::with_boundary(half_width, n, BoxBoundary::Dirichlet)
    }

    pub fn periodic(half_width: f64, n: usize) -> Result<Self> {
        Self::with_boundary(half_width, n, BoxBoundary::Periodic)
    }

    pub fn with_boundary(half_width: f64, n: usize, boundary: BoxBoundary) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width must be positive, got {half_width}")));
        }
        Self::from_spacing(2.0 * half_width / n.max(1) as f64, n, boundary)
    }

    pub fn from_spacing(h: f64, n: usize, boundary: BoxBoundary) -> Result<Self> {
        if !n.is_power_of_two() || n < 4 {
            return Err(Error::InvalidGrid(format!("box grid needs a power of two n >= 4, got {n}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        Ok(Self { n, h, boundary })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.n as f64 * self.h
    }

    pub fn boundary(&self) -> BoxBoundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of cell `(i, j, k)`, `i` running slowest.
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    /// Cell centre coordinate along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width() + (i as f64 + 0.5) * self.h
    }
}

/// Either grid kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    Radial(RadialGrid),
    Box(BoxGrid),
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::Radial(g) => g.len(),
            Grid::Box(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        match self {
            Grid::Radial(g) => g.h(),
            Grid::Box(g) => g.h(),
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, Grid::Radial(_))
    }

    /// Outer radius of the largest centred ball contained in the domain.
    pub fn extent(&self) -> f64 {
        match self {
            Grid::Radial(g) => g.r_max(),
            Grid::Box(g) => g.half_width(),
        }
    }
}

impl From<RadialGrid> for Grid {
    fn from(g: RadialGrid) -> Self {
        Grid::Radial(g)
    }
}

impl From<BoxGrid> for Grid {
    fn from(g: BoxGrid) -> Self {
        Grid::Box(g)
    }
}

/// Radial grid with `n` nodes on `(0, r_max)`.
pub fn make_radial_grid(r_max: f64, n: usize) -> Result<RadialGrid> {
    RadialGrid::new(r_max, n)
}

/// Dirichlet box `[-L, L]³` with `n` cells per axis.
pub fn make_box_grid(half_width: f64, n: usize) -> Result<BoxGrid> {
    BoxGrid::new(half_width, n)
}
