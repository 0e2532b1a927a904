//! Solution in a Gaussian well that passes the small-norm check for
//! nonpositive potentials, compared against the autonomous level.
//!
//! cargo run --release --example negative_potential

use sps_core::potentials::{check_v3, check_v4, potential_norms};
use sps_core::solver::{auto_radial_grid, continuation, ground_state, mp_path_level, HomotopySchedule, NewtonOptions};
use sps_core::verify::diagnostics;
use sps_core::{PotentialSpec, ProblemParams};

fn well(c: f64) -> PotentialSpec {
    PotentialSpec::GaussianWell { c, sigma: 1.0 }
}

fn main() -> sps_core::Result<()> {
    let params = ProblemParams::new(4.0, 0.5)?;
    let p = params.p;

    // amplitude at which the check changes sign
    let margin = |c: f64| check_v4(&potential_norms(&well(c), 3.0).unwrap(), p).unwrap().margin;
    let (mut lo, mut hi) = (1e-4_f64, 10.0_f64);
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if margin(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    println!("check_v4 passes for c < {lo:.6}");
    let v = well(0.1);
    println!("c = 0.1: V3 {}  V4 margin {:.4}", check_v3(&v)?.verdict, margin(0.1));

    let seed = ground_state(&params, auto_radial_grid(&params, 16384, 40.0)?)?;
    let c_a = seed.level();
    let schedule = HomotopySchedule::new(vec!["v:0:1:2".parse()?]);
    let sol = continuation(&schedule, &params, &v, &seed, &NewtonOptions::default())?;
    let d = diagnostics(&sol, &v, c_a)?;
    let mp = mp_path_level(&seed.u, &v, &params)?;
    println!("c_a            {c_a:.10}");
    println!("J_V(u)         {:.10}", d.level);
    println!("mp path level  {mp:.10}");
    println!("lambda         {:.6}", d.lambda);
    println!("ibp gap        {:.3e} (scale {:.3e})", d.ibp_gap, d.grad_sq);
    Ok(())
}
