use std::f64::consts::PI;

use super::field::{Field, Mesh};
use super::grid::{BoxBoundary, Grid};
use crate::error::{invalid, Result};

/// `∫ f dx` by the grid quadrature.
pub fn integrate(f: &Field) -> f64 {
    let m = f.mesh();
    match m.grid() {
        Grid::Radial(_) => {
            let h = m.spacing();
            let s: f64 = f
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let r = (i + 1) as f64 * h;
                    r * r * v
                })
                .sum();
            4.0 * PI * h * s
        }
        Grid::Box(_) => m.spacing().powi(3) * f.values().iter().sum::<f64>(),
    }
}

/// Discrete `L^q` norm, `q = ∞` allowed.
pub fn lp_norm(f: &Field, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return invalid(format!("L^q norm needs q >= 1, got {q}"));
    }
    if q.is_infinite() {
        return Ok(f.max_abs());
    }
    Ok(power_integral(f.mesh(), f.values(), q).powf(1.0 / q))
}

/// `∫ |f|^q dx` on raw nodal values.
pub(crate) fn power_integral(mesh: &Mesh, values: &[f64], q: f64) -> f64 {
    let pw: Vec<f64> = if q == 2.0 {
        values.iter().map(|v| v * v).collect()
    } else {
        values.iter().map(|v| v.abs().powf(q)).collect()
    };
    match mesh.grid() {
        Grid::Radial(_) => {
            let h = mesh.spacing();
            let s: f64 = pw
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let r = (i + 1) as f64 * h;
                    r * r * v
                })
                .sum();
            4.0 * PI * h * s
        }
        Grid::Box(_) => mesh.spacing().powi(3) * pw.iter().sum::<f64>(),
    }
}

/// `‖∇u‖₂²`, the exact quadratic form of the discrete Laplacian.
pub fn grad_sq(u: &Field) -> f64 {
    grad_sq_values(u.mesh(), u.values())
}

pub(crate) fn grad_sq_values(mesh: &Mesh, u: &[f64]) -> f64 {
    let h = mesh.spacing();
    match mesh.grid() {
        Grid::Radial(_) => {
            let mut prev = 0.0;
            let mut acc = 0.0;
            for (i, v) in u.iter().enumerate() {
                let w = (i + 1) as f64 * h * v;
                acc += (w - prev) * (w - prev);
                prev = w;
            }
            acc += prev * prev;
            4.0 * PI * acc / h
        }
        Grid::Box(g) => {
            let n = g.n();
            let periodic = g.boundary() == BoxBoundary::Periodic;
            let mut acc = 0.0;
            let strides = [n * n, n, 1];
            for idx in 0..u.len() {
                let coords = [idx / (n * n), (idx / n) % n, idx % n];
                for axis in 0..3 {
                    let c = coords[axis];
                    if c + 1 < n {
                        let d = u[idx + strides[axis]] - u[idx];
                        acc += d * d;
                    } else if periodic {
                        let d = u[idx + strides[axis] - n * strides[axis]] - u[idx];
                        acc += d * d;
                    } else {
                        acc += 2.0 * u[idx] * u[idx];
                    }
                    if c == 0 && !periodic {
                        acc += 2.0 * u[idx] * u[idx];
                    }
                }
            }
            h * acc
        }
    }
}

/// Discrete Laplacian with the grid's boundary conditions.
pub fn apply_laplacian(u: &Field) -> Result<Field> {
    let mut out = vec![0.0; u.len()];
    laplacian_into(u.mesh(), u.values(), &mut out);
    u.with_values(out)
}

pub(crate) fn laplacian_into(mesh: &Mesh, u: &[f64], out: &mut [f64]) {
    let h = mesh.spacing();
    match mesh.grid() {
        Grid::Radial(_) => {
            let m = u.len();
            let inv = 1.0 / (h * h);
            for i in 0..m {
                let r = (i + 1) as f64 * h;
                let w = r * u[i];
                let wl = if i > 0 { i as f64 * h * u[i - 1] } else { 0.0 };
                let wr = if i + 1 < m { (i + 2) as f64 * h * u[i + 1] } else { 0.0 };
                out[i] = (wr - 2.0 * w + wl) * inv / r;
            }
        }
        Grid::Box(g) => {
            let n = g.n();
            let periodic = g.boundary() == BoxBoundary::Periodic;
            let inv = 1.0 / (h * h);
            let strides = [n * n, n, 1];
            for idx in 0..u.len() {
                let coords = [idx / (n * n), (idx / n) % n, idx % n];
                let c0 = u[idx];
                let mut acc = -6.0 * c0;
                for axis in 0..3 {
                    let c = coords[axis];
                    let s = strides[axis];
                    acc += if c + 1 < n {
                        u[idx + s]
                    } else if periodic {
                        u[idx + s - n * s]
                    } else {
                        -c0
                    };
                    acc += if c > 0 {
                        u[idx - s]
                    } else if periodic {
                        u[idx + (n - 1) * s]
                    } else {
                        -c0
                    };
                }
                out[idx] = acc * inv;
            }
        }
    }
}

/// Mass-preserving dilation `u^t(x) = t^{3/2} u(t x)`.
///
/// Only the scale factor and a uniform multiplier change; no resampling.
pub fn rescale(u: &Field, t: f64) -> Result<Field> {
    if !(t.is_finite() && t > 0.0) {
        return invalid(format!("dilation parameter must be positive, got {t}"));
    }
    let mesh = u.mesh().dilated(t)?;
    let c = t.powf(1.5);
    Field::on_mesh(mesh, u.values().iter().map(|v| c * v).collect())
}

/// Evaluates `t^{3/2} u(t x)` back on the nodes of `u`'s own mesh.
///
/// Cubic interpolation of `w = r u` on radial grids, tricubic on boxes;
/// values outside the domain are zero.
pub fn resample_dilated(u: &Field, t: f64) -> Result<Field> {
    if !(t.is_finite() && t > 0.0) {
        return invalid(format!("dilation parameter must be positive, got {t}"));
    }
    let mesh = *u.mesh();
    let vals = u.values();
    let out = match mesh.grid() {
        Grid::Radial(_) => {
            let m = vals.len();
            let w: Vec<f64> = (0..m).map(|i| (i + 1) as f64 * vals[i]).collect();
            // node index j <-> w at position j (in units of h), w(0) = w(n) = 0, odd at 0
            let wat = |j: isize| -> f64 {
                if j < 0 {
                    let k = (-j) as usize;
                    if k > m {
                        0.0
                    } else {
                        -w[k - 1]
                    }
                } else if j == 0 || j as usize > m {
                    0.0
                } else {
                    w[j as usize - 1]
                }
            };
            let st = t.sqrt();
            (0..m)
                .map(|i| {
                    let j = (i + 1) as f64;
                    st * cubic_at(t * j, m + 1, &wat) / j
                })
                .collect()
        }
        Grid::Box(g) => {
            let n = g.n();
            let half = 0.5 * n as f64;
            let at = |i: isize, j: isize, k: isize| -> f64 {
                let nn = n as isize;
                if i < 0 || j < 0 || k < 0 || i >= nn || j >= nn || k >= nn {
                    0.0
                } else {
                    vals[(i as usize * n + j as usize) * n + k as usize]
                }
            };
            let c = t.powf(1.5);
            (0..vals.len())
                .map(|idx| {
                    let (a, b, d) = (idx / (n * n), (idx / n) % n, idx % n);
                    let to = |q: usize| (q as f64 + 0.5 - half) * t + half - 0.5;
                    c * tricubic_at([to(a), to(b), to(d)], &at)
                })
                .collect()
        }
    };
    Field::on_mesh(mesh, out)
}

fn catmull_rom(p: [f64; 4], s: f64) -> f64 {
    let [p0, p1, p2, p3] = p;
    p1 + 0.5 * s * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + s * (3.0 * (p1 - p2) + p3 - p0)))
}

fn cubic_at(x: f64, end: usize, f: &impl Fn(isize) -> f64) -> f64 {
    if x >= end as f64 {
        return 0.0;
    }
    let j = x.floor() as isize;
    let s = x - j as f64;
    catmull_rom([f(j - 1), f(j), f(j + 1), f(j + 2)], s)
}

fn tricubic_at(x: [f64; 3], f: &impl Fn(isize, isize, isize) -> f64) -> f64 {
    let base = [x[0].floor() as isize, x[1].floor() as isize, x[2].floor() as isize];
    let s = [x[0] - base[0] as f64, x[1] - base[1] as f64, x[2] - base[2] as f64];
    let mut plane = [0.0; 4];
    for (a, pa) in plane.iter_mut().enumerate() {
        let mut line = [0.0; 4];
        for (b, lb) in line.iter_mut().enumerate() {
            let i = base[0] + a as isize - 1;
            let j = base[1] + b as isize - 1;
            let row = [f(i, j, base[2] - 1), f(i, j, base[2]), f(i, j, base[2] + 1), f(i, j, base[2] + 2)];
            *lb = catmull_rom(row, s[2]);
        }
        *pa = catmull_rom(line, s[1]);
    }
    catmull_rom(plane, s[0])
}

/// Fraction of the mass carried by the outer 10% of the domain.
pub fn tail_mass_fraction(u: &Field) -> f64 {
    let m = u.mesh();
    let cut = 0.9 * m.extent();
    let total = u.mass();
    if total == 0.0 {
        return 0.0;
    }
    let mut tail = 0.0;
    for (i, v) in u.values().iter().enumerate() {
        let outside = match m.grid() {
            Grid::Radial(_) => m.radius(i) > cut,
            Grid::Box(_) => m.point(i).iter().any(|c| c.abs() > cut),
        };
        if outside {
            tail += m.weight(i) * v * v;
        }
    }
    tail / total
}
