//! Hartree potential of a Gaussian on a radial grid and on a cube.
//!
//! cargo run --release --example coulomb_gaussian -- [box_n]

use std::time::Instant;

use sps_core::coulomb::{hartree_b, solve_phi, CoulombSolverConfig};
use sps_core::mesh::{make_box_grid, make_radial_grid};
use sps_core::{Field, Mesh};

fn main() -> sps_core::Result<()> {
    let box_n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    let (a, sigma) = (1.0_f64, 1.0_f64);
    let norm = a * std::f64::consts::PI.powf(-0.75) * sigma.powf(-1.5);
    let profile = |r: f64| norm * (-0.5 * r * r / (sigma * sigma)).exp();
    let cfg = CoulombSolverConfig::default();

    let radial = make_radial_grid(40.0 * sigma, 4096)?;
    let u = Field::from_profile(Mesh::unit(radial), profile)?;
    let b = hartree_b(&u, &cfg)?;
    let exact = a.powi(4) * (2.0 / std::f64::consts::PI).sqrt() / sigma;
    println!("radial B        {b:.12}  exact {exact:.12}  rel {:.2e}", (b - exact).abs() / exact);
    let phi_r = solve_phi(&u, &cfg)?;

    let t = Instant::now();
    let cube = make_box_grid(8.0 * sigma, box_n)?;
    let ub = Field::from_profile(Mesh::unit(cube), profile)?;
    let phi_b = solve_phi(&ub, &cfg)?;
    // compare at every cube point with the radial potential interpolated linearly
    let h = radial.h();
    let vals = phi_r.values();
    let at = |r: f64| -> f64 {
        let x = r / h - 1.0;
        if x <= 0.0 {
            return vals[0];
        }
        let i = (x.floor() as usize).min(vals.len() - 2);
        let f = x - i as f64;
        (1.0 - f) * vals[i] + f * vals[i + 1]
    };
    let mut worst: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for (i, v) in phi_b.values().iter().enumerate() {
        let r = ub.mesh().radius(i);
        worst = worst.max((v - at(r)).abs());
        peak = peak.max(at(r).abs());
    }
    println!("box {box_n}^3 vs radial   rel L∞ {:.2e}  ({:.2?})", worst / peak, t.elapsed());
    Ok(())
}
