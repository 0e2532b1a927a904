//! Radial quadrature for potential norms.

use std::f64::consts::PI;

/// Where the numerical part stops and the algebraic tail takes over.
const R_TAIL: f64 = 1e4;

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
                break;
            }
        }
    }
    (x, w)
}

/// Panel edges: geometric from 1e-6 up to `R_TAIL`, plus `breaks`.
fn panels(breaks: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0];
    let mut r = 1e-6;
    while r < R_TAIL {
        e.push(r);
        r *= 1.15;
    }
    e.push(R_TAIL);
    e.extend(breaks.iter().copied().filter(|b| *b > 0.0 && *b < R_TAIL));
    e.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    e.dedup();
    e
}

/// `4π ∫_0^∞ |f(r)|^e r² dr`, with `|f| ~ C r^{-decay}` beyond `R_TAIL`.
pub fn radial_power_integral(f: &dyn Fn(f64) -> f64, e: f64, decay: Option<f64>, breaks: &[f64]) -> f64 {
    let (x, w) = gauss_legendre(16);
    let edges = panels(breaks);
    let mut acc = 0.0;
    for p in edges.windows(2) {
        let (a, b) = (p[0], p[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (xi, wi) in x.iter().zip(&w) {
            let r = mid + half * xi;
            acc += wi * half * f(r).abs().powf(e) * r * r;
        }
    }
    if let Some(m) = decay {
        let fr = f(R_TAIL).abs();
        if fr > 0.0 {
            let k = m * e - 3.0;
            if k <= 0.0 {
                return f64::INFINITY;
            }
            acc += fr.powf(e) * R_TAIL.powi(3) / k;
        }
    }
    4.0 * PI * acc
}

/// `sup_r |f(r)|` by dense sampling and a local golden-section refinement.
pub fn radial_sup(f: &dyn Fn(f64) -> f64, breaks: &[f64]) -> f64 {
    let mut pts = vec![0.0];
    let mut r = 1e-6;
    while r < 1e6 {
        pts.push(r);
        r *= 1.01;
    }
    pts.extend_from_slice(breaks);
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let vals: Vec<f64> = pts.iter().map(|&r| f(r).abs()).collect();
    let (k, &best) = vals.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).expect("finite")).expect("nonempty");
    let (mut lo, mut hi) = (pts[k.saturating_sub(1)], pts[(k + 1).min(pts.len() - 1)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut out = best;
    for _ in 0..100 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        let (fa, fb) = (f(a).abs(), f(b).abs());
        out = out.max(fa).max(fb);
        if fa > fb {
            hi = b;
        } else {
            lo = a;
        }
    }
    out
}
