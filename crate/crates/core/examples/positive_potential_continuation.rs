//! Continuation from the autonomous ground state into a nonnegative
//! power-decay potential, then outward in the domain radius at fixed spacing.
//!
//! cargo run --release --example positive_potential_continuation

use std::time::Instant;

use sps_core::potentials::{check_v1, potential_norms};
use sps_core::solver::{auto_radial_grid, continuation, ground_state, HomotopySchedule, NewtonOptions};
use sps_core::{PotentialSpec, ProblemParams};

fn main() -> sps_core::Result<()> {
    let t0 = Instant::now();
    let params = ProblemParams::new(4.0, 0.5)?;
    let (p, a) = (params.p, params.a);
    let seed = ground_state(&params, auto_radial_grid(&params, 8192, 40.0)?)?;
    let c_a = seed.level();

    // largest amplitude admitted by the bounded-potential check, halved
    let unit = PotentialSpec::PowerDecay { c: 1.0, alpha: 2.0 };
    let n1 = potential_norms(&unit, 3.0)?;
    let (theta, eta) = (0.3, 0.3);
    let c_max = (2.0 * theta * c_a / (a * a * n1.v_inf)).min(eta * c_a / (a * a * n1.w_inf));
    let v = PotentialSpec::PowerDecay { c: 0.5 * c_max, alpha: 2.0 };
    let norms = potential_norms(&v, 3.0)?;
    let rep = check_v1(&norms, a, c_a, theta, eta, p)?;
    println!("c_a = {c_a:.8}, amplitude {:.4}, V1 margin {:.4} ({})", 0.5 * c_max, rep.margin, rep.verdict);

    let legs = "v:0:1:4, r:8:16:2, r:16:24:1";
    let schedule = HomotopySchedule::new(legs.split(',').map(str::parse).collect::<sps_core::Result<_>>()?);
    let sol = continuation(&schedule, &params, &v, &seed, &NewtonOptions::default())?;
    println!("{:>4} {:>8} {:>16} {:>14} {:>10}", "leg", "value", "level", "lambda", "residual");
    for t in &sol.trace {
        println!("{:>4} {:>8.3} {:>16.8} {:>14.6} {:>10.2e}", t.leg, t.value, t.level, t.lambda, t.residual_norm);
    }
    let b = &sol.breakdown;
    let theta_min = norms.v_inf * a * a / (2.0 * c_a);
    let a_bound =
        6.0 * (p - 2.0) / (3.0 * p - 10.0) * (1.0 + theta_min) * c_a + 4.0 * a * a * norms.w_inf / (3.0 * p - 10.0);
    println!("converged {}  J_V - c_a = {:.6}", sol.converged, sol.level() - c_a);
    println!("A = {:.4} <= {a_bound:.4} (theta = {theta_min:.4})", b.grad_sq);
    println!("elapsed {:.2?}", t0.elapsed());
    Ok(())
}
