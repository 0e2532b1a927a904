//! The Coulomb term `φ_u = |x|^{-1} * u²` and `B(u) = ∫ φ_u u²`.
//!
//! Radial grids use the shell formula
//! `φ(r) = 4π/r ∫_0^r ρ + 4π ∫_r^∞ ρ/s` with `ρ = s² u²`, evaluated by
//! cumulative trapezoid sums with a one-term endpoint correction. The
//! resulting quadratic form is symmetric, so `∂B/∂u = 4 φ u` holds exactly
//! on the grid, and `φ >= 0` for every nonnegative density.
//!
//! Boxes use a zero-padded FFT convolution with a free-space kernel
//! obtained from the truncated symbol `4π (1 - cos(k L_t)) / k²`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::mesh::{Field, Grid, Mesh};

/// Settings of the box Coulomb solver. Radial grids ignore them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombSolverConfig {
    /// Kernel truncation radius; defaults to the effective box diameter.
    pub truncation_radius: Option<f64>,
    /// Zero-padding factor of the convolution (1 or 2).
    pub oversampling: usize,
}

impl Default for CoulombSolverConfig {
    fn default() -> Self {
        Self { truncation_radius: None, oversampling: 2 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct KernelKey {
    n: usize,
    m: usize,
    ell_bits: u64,
}

/// Half-spectrum `K̂[a][b][c]`, `a, b, c <= m/2`, of the dimensionless kernel.
type Spectrum = Arc<Vec<f64>>;

fn kernel_cache() -> &'static Mutex<HashMap<KernelKey, Spectrum>> {
    static CACHE: OnceLock<Mutex<HashMap<KernelKey, Spectrum>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coulomb solver holding FFT plans. Not meant to be shared between threads.
pub struct CoulombSolver {
    cfg: CoulombSolverConfig,
    planner: FftPlanner<f64>,
    warned: bool,
}

impl CoulombSolver {
    pub fn new(cfg: CoulombSolverConfig) -> Result<Self> {
        if !(cfg.oversampling == 1 || cfg.oversampling == 2) {
            return invalid(format!("oversampling must be 1 or 2, got {}", cfg.oversampling));
        }
        if let Some(lt) = cfg.truncation_radius {
            if !(lt.is_finite() && lt > 0.0) {
                return invalid(format!("truncation radius must be positive, got {lt}"));
            }
        }
        Ok(Self { cfg, planner: FftPlanner::new(), warned: false })
    }

    pub fn config(&self) -> &CoulombSolverConfig {
        &self.cfg
    }

    /// `φ = |x|^{-1} * d` for a nodal density `d` on `mesh`.
    pub fn potential(&mut self, mesh: &Mesh, density: &[f64]) -> Result<Vec<f64>> {
        match mesh.grid() {
            Grid::Radial(_) => Ok(radial_potential(mesh, density)),
            Grid::Box(_) => self.box_potential(mesh, density),
        }
    }

    pub fn solve_phi(&mut self, u: &Field) -> Result<Field> {
        let d: Vec<f64> = u.values().iter().map(|v| v * v).collect();
        let phi = self.potential(u.mesh(), &d)?;
        u.with_values(phi)
    }

    /// `B(u) = ∫ φ_u u²`.
    pub fn hartree(&mut self, u: &Field) -> Result<f64> {
        let phi = self.solve_phi(u)?;
        let d: Vec<f64> = u.values().iter().map(|v| v * v).collect();
        Ok(u.mesh().dot(phi.values(), &d))
    }

    fn box_potential(&mut self, mesh: &Mesh, density: &[f64]) -> Result<Vec<f64>> {
        let g = mesh.box_grid().expect("box mesh");
        let n = g.n();
        let h = mesh.spacing();
        let diameter = 2.0 * 3f64.sqrt() * mesh.extent();
        let lt = self.cfg.truncation_radius.unwrap_or(diameter);
        if lt < diameter * (1.0 - 1e-12) {
            return invalid(format!("truncation radius {lt} is smaller than the box diameter {diameter}"));
        }
        self.check_support(mesh, density);
        let m = self.cfg.oversampling * n;
        let ell = lt / h;
        let spec = kernel_spectrum(n, m, ell, &mut self.planner);
        let fft = self.planner.plan_fft_forward(m);
        let ifft = self.planner.plan_fft_inverse(m);
        let mut buf = vec![Complex64::new(0.0, 0.0); m * m * m];
        for i in 0..n {
            for j in 0..n {
                let src = (i * n + j) * n;
                let dst = (i * m + j) * m;
                for k in 0..n {
                    buf[dst + k] = Complex64::new(density[src + k], 0.0);
                }
            }
        }
        fft3(&mut buf, m, n, &fft, true);
        let half = m / 2 + 1;
        let fold = |v: usize| v.min(m - v);
        for a in 0..m {
            for b in 0..m {
                let row = (fold(a) * half + fold(b)) * half;
                let base = (a * m + b) * m;
                for c in 0..m {
                    buf[base + c] *= spec[row + fold(c)];
                }
            }
        }
        fft3(&mut buf, m, n, &ifft, false);
        let norm = h * h / (m * m * m) as f64;
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let src = (i * m + j) * m;
                let dst = (i * n + j) * n;
                for k in 0..n {
                    out[dst + k] = buf[src + k].re * norm;
                }
            }
        }
        Ok(out)
    }

    fn check_support(&mut self, mesh: &Mesh, density: &[f64]) {
        if self.warned {
            return;
        }
        let cut = 0.9 * mesh.extent();
        let total: f64 = density.iter().map(|d| d.abs()).sum();
        let shell: f64 = density
            .iter()
            .enumerate()
            .filter(|(i, _)| mesh.point(*i).iter().any(|c| c.abs() > cut))
            .map(|(_, d)| d.abs())
            .sum();
        if total > 0.0 && shell > 1e-12 * total {
            log::warn!(
                "density reaches the outer 10% shell of the box (fraction {:.3e}); \
                 the Coulomb potential feels the domain truncation",
                shell / total
            );
            self.warned = true;
        }
    }
}

/// `φ_u` with a one-off solver.
pub fn solve_phi(u: &Field, cfg: &CoulombSolverConfig) -> Result<Field> {
    CoulombSolver::new(*cfg)?.solve_phi(u)
}

/// `B(u)` with a one-off solver.
pub fn hartree_b(u: &Field, cfg: &CoulombSolverConfig) -> Result<f64> {
    CoulombSolver::new(*cfg)?.hartree(u)
}

fn radial_potential(mesh: &Mesh, density: &[f64]) -> Vec<f64> {
    let h = mesh.spacing();
    let m = density.len();
    let r = |i: usize| (i + 1) as f64 * h;
    let rho: Vec<f64> = (0..m).map(|i| r(i) * r(i) * density[i]).collect();
    let g: Vec<f64> = (0..m).map(|i| rho[i] / r(i)).collect();
    let at = |v: &[f64], i: isize| -> f64 {
        if i < 0 || i as usize >= m {
            0.0
        } else {
            v[i as usize]
        }
    };
    let mut inner = vec![0.0; m];
    let mut run = 0.0;
    for i in 0..m {
        let ii = i as isize;
        inner[i] = h * (run + 0.5 * rho[i]) - h / 24.0 * (at(&rho, ii + 1) - at(&rho, ii - 1));
        run += rho[i];
    }
    let mut phi = vec![0.0; m];
    let mut run = 0.0;
    for i in (0..m).rev() {
        let ii = i as isize;
        let outer = h * (run + 0.5 * g[i]) + h / 24.0 * (at(&g, ii + 1) - at(&g, ii - 1));
        run += g[i];
        phi[i] = 4.0 * PI * (inner[i] / r(i) + outer);
    }
    phi
}

/// In-place 3D FFT of an `m³` buffer whose input (forward) or needed output
/// (inverse) is confined to the first `n` indices along every axis.
fn fft3(buf: &mut [Complex64], m: usize, n: usize, fft: &Arc<dyn Fft<f64>>, forward: bool) {
    let mut scratch = vec![Complex64::new(0.0, 0.0); m * m];
    let z_pass = |buf: &mut [Complex64]| {
        for i in 0..n {
            for j in 0..n {
                let s = (i * m + j) * m;
                fft.process(&mut buf[s..s + m]);
            }
        }
    };
    let y_pass = |buf: &mut [Complex64], scratch: &mut [Complex64]| {
        for i in 0..n {
            let slab = &mut buf[i * m * m..(i + 1) * m * m];
            for j in 0..m {
                for k in 0..m {
                    scratch[k * m + j] = slab[j * m + k];
                }
            }
            fft.process(scratch);
            for j in 0..m {
                for k in 0..m {
                    slab[j * m + k] = scratch[k * m + j];
                }
            }
        }
    };
    let x_pass = |buf: &mut [Complex64], scratch: &mut [Complex64]| {
        for j in 0..m {
            for i in 0..m {
                let s = (i * m + j) * m;
                for k in 0..m {
                    scratch[k * m + i] = buf[s + k];
                }
            }
            fft.process(scratch);
            for i in 0..m {
                let s = (i * m + j) * m;
                for k in 0..m {
                    buf[s + k] = scratch[k * m + i];
                }
            }
        }
    };
    if forward {
        z_pass(buf);
        y_pass(buf, &mut scratch);
        x_pass(buf, &mut scratch);
    } else {
        x_pass(buf, &mut scratch);
        y_pass(buf, &mut scratch);
        z_pass(buf);
    }
}

fn kernel_spectrum(n: usize, m: usize, ell: f64, planner: &mut FftPlanner<f64>) -> Spectrum {
    let key = KernelKey { n, m, ell_bits: ell.to_bits() };
    if let Some(s) = kernel_cache().lock().expect("kernel cache").get(&key) {
        return s.clone();
    }
    // Real-space kernel from the truncated symbol on a 4n-periodic k grid,
    // large enough that no periodic image reaches the box.
    let q = 4 * n;
    let qh = q / 2 + 1;
    let mh = m / 2 + 1;
    let mut sym = vec![0.0; qh * qh * qh];
    let dk = 2.0 * PI / q as f64;
    for a in 0..qh {
        for b in 0..qh {
            for c in 0..qh {
                let k2 = ((a * a + b * b + c * c) as f64) * dk * dk;
                sym[(a * qh + b) * qh + c] =
                    if k2 == 0.0 { 2.0 * PI * ell * ell } else { 4.0 * PI * (1.0 - (k2.sqrt() * ell).cos()) / k2 };
            }
        }
    }
    let mut gamma = cosine_transform_3d(&sym, qh, q, mh, planner);
    drop(sym);
    let norm = 1.0 / (q * q * q) as f64;
    gamma.iter_mut().for_each(|v| *v *= norm);
    let spec = Arc::new(cosine_transform_3d(&gamma, mh, m, mh, planner));
    let mut cache = kernel_cache().lock().expect("kernel cache");
    if cache.len() >= 4 {
        cache.clear();
    }
    cache.insert(key, spec.clone());
    spec
}

/// Separable even-extension transform
/// `out[j] = Σ_{k=0}^{P-1} x[min(k, P-k)] cos(2π k j / P)` along every axis of
/// a cube with `len_in` entries per axis, keeping `len_out` outputs.
fn cosine_transform_3d(
    input: &[f64],
    len_in: usize,
    period: usize,
    len_out: usize,
    planner: &mut FftPlanner<f64>,
) -> Vec<f64> {
    let fft = planner.plan_fft_forward(period);
    let mut line = vec![Complex64::new(0.0, 0.0); period];
    let mut dims = [len_in, len_in, len_in];
    let mut data = input.to_vec();
    for _ in 0..3 {
        let [d0, d1, d2] = dims;
        // transform along the last axis, rotate (x, y, z) -> (z', x, y)
        let mut out = vec![0.0; len_out * d0 * d1];
        for x in 0..d0 {
            for y in 0..d1 {
                let src = &data[(x * d1 + y) * d2..(x * d1 + y + 1) * d2];
                for (k, l) in line.iter_mut().enumerate() {
                    let idx = k.min(period - k);
                    *l = Complex64::new(if idx < d2 { src[idx] } else { 0.0 }, 0.0);
                }
                fft.process(&mut line);
                for z in 0..len_out {
                    out[(z * d0 + x) * d1 + y] = line[z].re;
                }
            }
        }
        data = out;
        dims = [len_out, d0, d1];
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoxGrid, RadialGrid};

    #[test]
    fn cosine_transform_matches_direct_sum() {
        let mut planner = FftPlanner::new();
        let p = 8;
        let len = p / 2 + 1;
        let x: Vec<f64> = (0..len * len * len).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let got = cosine_transform_3d(&x, len, p, len, &mut planner);
        let at = |a: usize, b: usize, c: usize| x[(a * len + b) * len + c];
        let f = |k: usize| k.min(p - k);
        for (ja, jb, jc) in [(0, 0, 0), (1, 2, 3), (4, 0, 2), (3, 3, 3)] {
            let mut s = 0.0;
            for a in 0..p {
                for b in 0..p {
                    for c in 0..p {
                        s += at(f(a), f(b), f(c))
                            * (2.0 * PI * (a * ja) as f64 / p as f64).cos()
                            * (2.0 * PI * (b * jb) as f64 / p as f64).cos()
                            * (2.0 * PI * (c * jc) as f64 / p as f64).cos();
                    }
                }
            }
            let v = got[(ja * len + jb) * len + jc];
            assert!((v - s).abs() < 1e-9 * s.abs().max(1.0), "{v} vs {s}");
        }
    }

    #[test]
    fn radial_point_charge_shell() {
        // a thin positive shell gives a nonnegative potential, flat inside
        let g = RadialGrid::new(10.0, 1000).unwrap();
        let u = Field::from_radial_fn(&g, |r| (-(r - 5.0) * (r - 5.0) * 50.0).exp()).unwrap();
        let phi = solve_phi(&u, &CoulombSolverConfig::default()).unwrap();
        assert!(phi.values().iter().all(|v| *v >= 0.0));
        let v = phi.values();
        assert!((v[10] - v[100]).abs() < 1e-6 * v[10]);
    }

    #[test]
    fn box_kernel_reproduces_far_field() {
        let g = BoxGrid::new(4.0, 16).unwrap();
        let mesh = Mesh::unit(g);
        let mut d = vec![0.0; g.len()];
        d[g.index(8, 8, 8)] = 1.0;
        let mut s = CoulombSolver::new(CoulombSolverConfig::default()).unwrap();
        let phi = s.potential(&mesh, &d).unwrap();
        let h3 = g.h().powi(3);
        let src = mesh.point(g.index(8, 8, 8));
        for &(i, j, k) in &[(0usize, 0usize, 0usize), (15, 8, 8), (2, 13, 5)] {
            let p = mesh.point(g.index(i, j, k));
            let dist = ((p[0] - src[0]).powi(2) + (p[1] - src[1]).powi(2) + (p[2] - src[2]).powi(2)).sqrt();
            let want = h3 / dist;
            let got = phi[g.index(i, j, k)];
            assert!((got - want).abs() < 2e-2 * want, "{got} vs {want}");
        }
    }
}
