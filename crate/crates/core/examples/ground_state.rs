//! Autonomous ground state at p = 4, a = 0.5 on an automatically sized radial grid.

use std::time::Instant;

use sps_core::solver::{auto_radial_grid, gaussian_fiber_width, ground_state};
use sps_core::ProblemParams;

fn main() -> sps_core::Result<()> {
    let params = ProblemParams::new(4.0, 0.5)?;
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8192);
    let sigma = gaussian_fiber_width(&params)?;
    let grid = auto_radial_grid(&params, n, 40.0)?;
    println!("gaussian width {sigma:.6e}, r_max {:.6e}, n {n}", grid.r_max());
    let t0 = Instant::now();
    let sol = ground_state(&params, grid)?;
    let b = &sol.breakdown;
    println!("converged      {}", sol.converged);
    println!("iterations     {}", sol.iterations);
    println!("residual       {:.3e}", sol.residual_norm);
    println!("c_a            {:.12e}", sol.level());
    println!("lambda         {:.12e}", sol.lambda);
    println!("A B E          {:.6e} {:.6e} {:.6e}", b.grad_sq, b.hartree, b.nonlinear);
    println!("pohozaev / A   {:.3e}", sol.pohozaev_residual / b.grad_sq);
    println!("elapsed        {:.2?}", t0.elapsed());
    Ok(())
}
