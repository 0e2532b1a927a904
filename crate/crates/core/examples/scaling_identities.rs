//! Dilation laws of the energy terms, on a Gaussian and on a deliberately
//! wrong dilation.
//!
//! cargo run --release --example scaling_identities

use sps_core::mesh::{make_radial_grid, resample_dilated};
use sps_core::verify::{scaling_identity_suite, scaling_identity_suite_with};
use sps_core::{Field, Mesh};

fn main() -> sps_core::Result<()> {
    let g = make_radial_grid(15.0, 3000)?;
    let u = Field::from_radial_fn(&g, |r| (-r * r / 2.0).exp() * (1.0 + 0.3 * (-r * r).exp()))?;
    let rep = scaling_identity_suite(&u, 4.0)?;
    println!("{:<12} {:>5} {:>10}", "law", "t", "rel err");
    for c in &rep.checks {
        println!("{:<12} {:>5} {:>10.2e}", c.law, c.t, c.rel_err);
    }
    println!("passed {}", rep.passed());

    // interpolating on the fixed nodes only holds the laws to discretization accuracy
    let interp = scaling_identity_suite_with(&u, 4.0, resample_dilated)?;
    let worst = interp.checks.iter().map(|c| c.rel_err).fold(0.0, f64::max);
    println!("resampled dilation: worst {worst:.2e}, violations {:?}", interp.violations());

    let off = |f: &Field, t: f64| {
        let m = Mesh::new(*f.grid(), f.mesh().scale() * t * 1.01)?;
        Field::on_mesh(m, f.values().iter().map(|v| v * t.powf(1.5)).collect())
    };
    println!("1% stretch: violations {:?}", scaling_identity_suite_with(&u, 4.0, off)?.violations());
    Ok(())
}
