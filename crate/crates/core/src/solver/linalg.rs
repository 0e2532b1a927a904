//! Small dense/banded kernels used by the Newton solver.

use crate::error::Result;

/// Solves a tridiagonal system with partial pivoting.
///
/// `sub[i]` couples row `i` to `i-1`, `sup[i]` couples row `i` to `i+1`.
/// Returns `None` for an exactly singular pivot.
pub fn tridiag_solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    // Row i of U has entries at i, i+1, i+2 (the last from pivoting).
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![0.0; n];
    let mut dl: Vec<f64> = (0..n).map(|i| if i + 1 < n { sub[i + 1] } else { 0.0 }).collect();
    let mut b = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                return None;
            }
            let f = dl[i] / d[i];
            dl[i] = f;
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            du2[i] = 0.0;
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            let tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - f * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
        }
    }
    if d[n - 1] == 0.0 {
        return None;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= du[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= du2[i] * x[i + 2];
        }
        x[i] = s / d[i];
    }
    Some(x)
}

/// Result of a GMRES solve.
#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Right-preconditioned restarted GMRES for `A x = b`.
///
/// `apply(x, y)` sets `y = A x`; `precond(r, z)` sets `z ≈ A⁻¹ r`.
pub fn gmres(
    mut apply: impl FnMut(&[f64], &mut [f64]) -> Result<()>,
    mut precond: impl FnMut(&[f64], &mut [f64]) -> Result<()>,
    b: &[f64],
    rtol: f64,
    max_iter: usize,
    restart: usize,
) -> Result<GmresOutcome> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(GmresOutcome { x, iterations: 0, relative_residual: 0.0, converged: true });
    }
    let mut total = 0;
    let mut r = b.to_vec();
    let mut rel = 1.0;
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    while total < max_iter {
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= rtol {
            return Ok(GmresOutcome { x, iterations: total, relative_residual: rel, converged: true });
        }
        let k_max = restart.min(max_iter - total);
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|e| e / beta).collect()];
        let mut hmat = vec![vec![0.0; k_max]; k_max + 1];
        let mut cs = vec![0.0; k_max];
        let mut sn = vec![0.0; k_max];
        let mut g = vec![0.0; k_max + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..k_max {
            precond(&v[k], &mut z)?;
            apply(&z, &mut w)?;
            total += 1;
            for (j, vj) in v.iter().enumerate() {
                let hj = dot(&w, vj);
                hmat[j][k] = hj;
                axpy(-hj, vj, &mut w);
            }
            // one reorthogonalization pass keeps the basis clean
            for (j, vj) in v.iter().enumerate() {
                let hj = dot(&w, vj);
                hmat[j][k] += hj;
                axpy(-hj, vj, &mut w);
            }
            let hn = norm(&w);
            hmat[k + 1][k] = hn;
            for j in 0..k {
                let t = cs[j] * hmat[j][k] + sn[j] * hmat[j + 1][k];
                hmat[j + 1][k] = -sn[j] * hmat[j][k] + cs[j] * hmat[j + 1][k];
                hmat[j][k] = t;
            }
            let den = (hmat[k][k] * hmat[k][k] + hmat[k + 1][k] * hmat[k + 1][k]).sqrt();
            if den == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = hmat[k][k] / den;
            sn[k] = hmat[k + 1][k] / den;
            hmat[k][k] = den;
            hmat[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            rel = g[k + 1].abs() / bnorm;
            if rel <= rtol || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|e| e / hn).collect());
        }
        // back substitution
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= hmat[i][j] * y[j];
            }
            y[i] = s / hmat[i][i];
        }
        let mut dz = vec![0.0; n];
        for (j, yj) in y.iter().enumerate() {
            axpy(*yj, &v[j], &mut dz);
        }
        precond(&dz, &mut z)?;
        axpy(1.0, &z, &mut x);
        apply(&x, &mut w)?;
        for i in 0..n {
            r[i] = b[i] - w[i];
        }
        if k_used == 0 {
            break;
        }
    }
    let rel_true = norm(&r) / bnorm;
    Ok(GmresOutcome {
        x,
        iterations: total,
        relative_residual: rel_true.max(0.0).min(rel.max(rel_true)),
        converged: rel_true <= rtol,
    })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

/// `(-Δ_h + σ)⁻¹` on a Dirichlet cell-centred box via the DST-II basis.
pub struct BoxShiftedLaplacian {
    n: usize,
    basis: Vec<f64>,
    eig: Vec<f64>,
}

impl BoxShiftedLaplacian {
    pub fn new(n: usize, h: f64) -> Self {
        let pi = std::f64::consts::PI;
        let mut basis = vec![0.0; n * n];
        for k in 0..n {
            let norm = if k + 1 == n { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            for i in 0..n {
                basis[k * n + i] = norm * (pi * (k + 1) as f64 * (i as f64 + 0.5) / n as f64).sin();
            }
        }
        let eig = (0..n).map(|k| 4.0 / (h * h) * (pi * (k + 1) as f64 / (2.0 * n as f64)).sin().powi(2)).collect();
        Self { n, basis, eig }
    }

    fn transform(&self, x: &mut [f64], forward: bool) {
        let n = self.n;
        let mut line = vec![0.0; n];
        let strides = [n * n, n, 1];
        for &s in &strides {
            for base in 0..n * n * n {
                // visit each line once: the coordinate along `s` is zero
                if (base / s) % n != 0 {
                    continue;
                }
                for (k, l) in line.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for i in 0..n {
                        let b = if forward { self.basis[k * n + i] } else { self.basis[i * n + k] };
                        acc += b * x[base + i * s];
                    }
                    *l = acc;
                }
                for (i, l) in line.iter().enumerate() {
                    x[base + i * s] = *l;
                }
            }
        }
    }

    pub fn solve(&self, sigma: f64, rhs: &[f64], out: &mut [f64]) {
        let n = self.n;
        out.copy_from_slice(rhs);
        self.transform(out, true);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    out[(a * n + b) * n + c] /= self.eig[a] + self.eig[b] + self.eig[c] + sigma;
                }
            }
        }
        self.transform(out, false);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_with_pivoting() {
        // zero leading diagonal forces a row swap
        let sub = [0.0, 1.0, 2.0, 1.0];
        let diag = [0.0, 3.0, 1.0, 4.0];
        let sup = [2.0, 1.0, 5.0, 0.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut b = [0.0; 4];
        for i in 0..4 {
            b[i] = diag[i] * x[i];
            if i > 0 {
                b[i] += sub[i] * x[i - 1];
            }
            if i < 3 {
                b[i] += sup[i] * x[i + 1];
            }
        }
        let got = tridiag_solve(&sub, &diag, &sup, &b).unwrap();
        for i in 0..4 {
            assert!((got[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn gmres_solves_nonsymmetric_system() {
        let n = 30;
        let a = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                y[i] = 4.0 * x[i] + if i > 0 { -x[i - 1] } else { 0.0 } + if i + 1 < n { 2.0 * x[i + 1] } else { 0.0 };
            }
            Ok(())
        };
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let out = gmres(
            a,
            |r, z| {
                z.copy_from_slice(r);
                Ok(())
            },
            &b,
            1e-12,
            200,
            10,
        )
        .unwrap();
        assert!(out.converged);
        let mut y = vec![0.0; n];
        a(&out.x, &mut y).unwrap();
        for i in 0..n {
            assert!((y[i] - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn dst_inverse_matches_laplacian() {
        use crate::mesh::{laplacian_into, BoxGrid, Mesh};
        let g = BoxGrid::new(1.0, 8).unwrap();
        let mesh = Mesh::unit(g);
        let rhs: Vec<f64> = (0..g.len()).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let op = BoxShiftedLaplacian::new(8, g.h());
        let mut x = vec![0.0; g.len()];
        op.solve(2.5, &rhs, &mut x);
        let mut lap = vec![0.0; g.len()];
        laplacian_into(&mesh, &x, &mut lap);
        for i in 0..g.len() {
            assert!((-lap[i] + 2.5 * x[i] - rhs[i]).abs() < 1e-9);
        }
    }
}
