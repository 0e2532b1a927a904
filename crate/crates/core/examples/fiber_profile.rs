//! The fiber map `t ↦ J_V(u^t)` of a ground state: its maximum sits at
//! `t = 1`, and a potential moves it.
//!
//! cargo run --release --example fiber_profile

use sps_core::energy::{fiber_profile, fiber_stationary};
use sps_core::solver::{auto_radial_grid, ground_state, mp_path_level};
use sps_core::{PotentialSpec, ProblemParams};

fn main() -> sps_core::Result<()> {
    let params = ProblemParams::new(4.0, 0.5)?;
    let sol = ground_state(&params, auto_radial_grid(&params, 8192, 40.0)?)?;
    let u = &sol.u;
    println!("t* = {:.10}  (c_a = {:.6})", fiber_stationary(u, &params)?, sol.level());
    let well = PotentialSpec::GaussianWell { c: 0.1, sigma: 1.0 };
    println!("{:>8} {:>14} {:>14}", "t", "J_0(u^t)", "J_well(u^t)");
    for k in 0..=16 {
        let t = 10f64.powf(-0.8 + 0.1 * k as f64);
        let j0 = fiber_profile(u, &PotentialSpec::Zero, &params, t)?;
        let jw = fiber_profile(u, &well, &params, t)?;
        println!("{t:>8.4} {j0:>14.6} {jw:>14.6}");
    }
    println!(
        "max over the fiber: {:.6} (V = 0), {:.6} (well)",
        mp_path_level(u, &PotentialSpec::Zero, &params)?,
        mp_path_level(u, &well, &params)?
    );
    Ok(())
}
