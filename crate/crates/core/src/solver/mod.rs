//! Ground states, Newton refinement, homotopy continuation and the
//! mountain-pass level along a fiber.
//!
//! The autonomous ground state is found by a preconditioned descent of
//! `I(u) = max_t J_0(u^t)` over the mass sphere (each iterate is pushed back
//! onto the Pohozaev set by resampling its fiber maximizer), followed by a
//! bordered Newton–Krylov polish of `(u, λ)`.

mod continuation;
pub mod linalg;
mod newton;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use continuation::{continuation, HomotopyLeg, HomotopySchedule, LegKind, TraceEntry};
pub use newton::newton_refine;

use crate::coulomb::CoulombSolverConfig;
use crate::energy::{fiber_profile_from, EnergyBreakdown, Evaluator, ProblemParams};
use crate::error::{invalid, Error, Result};
use crate::mesh::{resample_dilated, Field, Grid, Mesh, RadialGrid};
use crate::potentials::PotentialSpec;

/// Newton–Krylov settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Target for the relative residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Krylov tolerance as a multiple of the current residual.
    pub forcing: f64,
    pub max_krylov: usize,
    pub restart: usize,
    pub coulomb: CoulombSolverConfig,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            forcing: 1e-3,
            max_krylov: 500,
            restart: 60,
            coulomb: CoulombSolverConfig::default(),
        }
    }
}

/// Settings of the ground-state search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateOptions {
    pub newton: NewtonOptions,
    /// Initial step of the preconditioned descent.
    pub descent_step: f64,
    pub max_descent: usize,
    /// Relative residual at which the descent hands over to Newton.
    pub handoff_tol: f64,
    /// Seed of a random positive perturbation of the initial Gaussian.
    pub seed: Option<u64>,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self { newton: NewtonOptions::default(), descent_step: 0.5, max_descent: 3000, handoff_tol: 1e-4, seed: None }
    }
}

/// A (candidate) normalized solution.
#[derive(Debug, Clone)]
pub struct Solution {
    pub u: Field,
    pub lambda: f64,
    pub params: ProblemParams,
    /// The potential the solution belongs to.
    pub potential: PotentialSpec,
    pub breakdown: EnergyBreakdown,
    pub residual_norm: f64,
    pub pohozaev_residual: f64,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
}

impl Solution {
    /// `J_V(u)`.
    pub fn level(&self) -> f64 {
        self.breakdown.energy(&self.params)
    }
}

/// Width `σ*` of the Gaussian that sits on the Pohozaev set of `J_0`.
pub fn gaussian_fiber_width(params: &ProblemParams) -> Result<f64> {
    params.validate()?;
    let (a, p) = (params.a, params.p);
    let b = EnergyBreakdown {
        grad_sq: 1.5 * a * a,
        hartree: a.powi(4) * (2.0 / PI).sqrt(),
        potential: 0.0,
        virial: 0.0,
        nonlinear: a.powf(p) * PI.powf(-0.75 * p) * (2.0 * PI / p).powf(1.5),
        mass: a * a,
    };
    Ok(1.0 / b.fiber_stationary(params)?)
}

/// Radial grid of `n` nodes whose extent is `extent_widths` Gaussian widths.
pub fn auto_radial_grid(params: &ProblemParams, n: usize, extent_widths: f64) -> Result<RadialGrid> {
    RadialGrid::new(extent_widths * gaussian_fiber_width(params)?, n)
}

/// `|u|` rescaled to mass `a²`.
pub fn enforce_nonneg(u: &Field, a: f64) -> Result<Field> {
    let v = u.map(f64::abs)?;
    normalize(&v, a)
}

fn normalize(u: &Field, a: f64) -> Result<Field> {
    let m = u.mass();
    if !(m > 0.0) {
        return Err(Error::Solver("cannot normalize a zero field".into()));
    }
    u.scaled(a / m.sqrt())
}

/// Moves `u` to the maximizer of its fiber, staying on the same mesh.
fn fiber_project(ev: &mut Evaluator, u: &Field) -> Result<Field> {
    let b = ev.breakdown(u)?;
    let t = b.fiber_stationary(ev.params())?;
    normalize(&resample_dilated(u, t)?, ev.params().a)
}

fn initial_guess(mesh: Mesh, params: &ProblemParams, seed: Option<u64>) -> Result<Field> {
    let sigma = gaussian_fiber_width(params)?;
    let bumps: Vec<(f64, f64)> = match seed {
        None => vec![],
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (1..=3).map(|k| (rng.gen_range(-0.1..0.1) / k as f64, rng.gen_range(0.0..PI))).collect()
        }
    };
    let u = Field::from_profile(mesh, |r| {
        let x = r / sigma;
        let pert: f64 = bumps.iter().enumerate().map(|(k, (c, ph))| c * ((k + 1) as f64 * x + ph).cos()).sum();
        (-0.5 * x * x).exp() * (1.0 + pert)
    })?;
    normalize(&u, params.a)
}

/// Autonomous (`V ≡ 0`) ground state with default options.
pub fn ground_state(params: &ProblemParams, grid: impl Into<Grid>) -> Result<Solution> {
    ground_state_with(params, grid, &GroundStateOptions::default())
}

pub fn ground_state_with(params: &ProblemParams, grid: impl Into<Grid>, opts: &GroundStateOptions) -> Result<Solution> {
    params.validate()?;
    if !(opts.descent_step > 0.0) {
        return invalid("descent step must be positive");
    }
    let grid: Grid = grid.into();
    check_resolution(params, &grid)?;
    let mesh = Mesh::unit(grid);
    let mut ev = Evaluator::new(&PotentialSpec::Zero, params, &opts.newton.coulomb)?;
    let a = params.a;
    let mut u = fiber_project(&mut ev, &initial_guess(mesh, params, opts.seed)?)?;
    let mut level = ev.breakdown(&u)?.energy(params);
    let mut tau = opts.descent_step;
    let mut flat = 0;
    for _ in 0..opts.max_descent {
        let (g, _) = ev.first_variation(&u)?;
        let vals = u.values();
        let lambda = -mesh.dot(&g, vals) / mesh.dot(vals, vals);
        let st = newton::residual(&mut ev, &u, lambda)?;
        if st.norm < opts.handoff_tol {
            break;
        }
        let r: Vec<f64> = g.iter().zip(vals).map(|(gi, x)| gi + lambda * x).collect();
        let mut d = precondition(&mesh, &r, lambda.max(0.0) + 1e-12 / mesh.spacing().powi(2))?;
        let c = mesh.dot(&d, vals) / mesh.dot(vals, vals);
        for (di, x) in d.iter_mut().zip(vals) {
            *di = -(*di - c * x);
        }
        let mut accepted = false;
        while tau > 1e-10 {
            let cand: Vec<f64> = vals.iter().zip(&d).map(|(x, di)| x + tau * di).collect();
            let cand = fiber_project(&mut ev, &normalize(&u.with_values(cand)?, a)?)?;
            let cl = ev.breakdown(&cand)?.energy(params);
            if cl <= level + 1e-15 * level.abs() {
                flat = if (level - cl).abs() < 1e-14 * level.abs() { flat + 1 } else { 0 };
                u = cand;
                level = cl;
                tau = (tau * 1.5).min(4.0 * opts.descent_step);
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if !accepted || flat >= 50 {
            break;
        }
    }
    let u = enforce_nonneg(&u, a)?;
    let lambda0 = ev.breakdown(&u)?.lagrange_multiplier(params);
    newton::refine(&mut ev, &u, lambda0, &opts.newton)
}

/// Rejects grids that cannot hold a ground state of width `σ*`.
fn check_resolution(params: &ProblemParams, grid: &Grid) -> Result<()> {
    let sigma = gaussian_fiber_width(params)?;
    if grid.h() > sigma {
        return Err(Error::InvalidGrid(format!(
            "spacing {:.3e} does not resolve the ground-state width {sigma:.3e}; \
             use at least {} nodes or a radial grid of about 40 widths",
            grid.h(),
            (grid.extent() / sigma).ceil() as usize
        )));
    }
    if grid.extent() < 8.0 * sigma {
        return Err(Error::InvalidGrid(format!(
            "domain radius {:.3e} is below 8 ground-state widths ({:.3e})",
            grid.extent(),
            8.0 * sigma
        )));
    }
    Ok(())
}

/// `(-Δ_h + σ)⁻¹ r`.
fn precondition(mesh: &Mesh, r: &[f64], sigma: f64) -> Result<Vec<f64>> {
    let h = mesh.spacing();
    match mesh.grid() {
        Grid::Radial(_) => {
            let m = r.len();
            let ih2 = 1.0 / (h * h);
            let sub: Vec<f64> = (0..m).map(|i| if i > 0 { -ih2 * i as f64 / (i + 1) as f64 } else { 0.0 }).collect();
            let sup: Vec<f64> =
                (0..m).map(|i| if i + 1 < m { -ih2 * (i + 2) as f64 / (i + 1) as f64 } else { 0.0 }).collect();
            let diag = vec![2.0 * ih2 + sigma; m];
            linalg::tridiag_solve(&sub, &diag, &sup, r).ok_or_else(|| Error::Solver("singular preconditioner".into()))
        }
        Grid::Box(g) => {
            let op = linalg::BoxShiftedLaplacian::new(g.n(), h);
            let mut out = vec![0.0; r.len()];
            op.solve(sigma, r, &mut out);
            Ok(out)
        }
    }
}

/// `max_t J_V(u^t)` over the fiber of `u`.
pub fn mp_path_level(u_seed: &Field, v: &PotentialSpec, params: &ProblemParams) -> Result<f64> {
    let b = crate::energy::energy_breakdown(u_seed, &PotentialSpec::Zero, params)?;
    if !(b.nonlinear > 0.0) {
        return invalid("mountain-pass path needs a nonzero seed");
    }
    let f = |t: f64| fiber_profile_from(&b, u_seed, v, params, t);
    let ladder: Vec<f64> = (0..=400).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 400.0)).collect();
    let mut vals = Vec::with_capacity(ladder.len());
    for &t in &ladder {
        vals.push(f(t)?);
    }
    let k = (0..vals.len()).max_by(|&i, &j| vals[i].partial_cmp(&vals[j]).expect("finite")).expect("nonempty");
    if k == 0 || k == vals.len() - 1 {
        return Err(Error::Solver("fiber maximum not bracketed in t ∈ [1e-2, 1e2]".into()));
    }
    let (mut lo, mut hi) = (ladder[k - 1].ln(), ladder[k + 1].ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut best = vals[k];
    for _ in 0..80 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        let (f1, f2) = (f(x1.exp())?, f(x2.exp())?);
        best = best.max(f1).max(f2);
        if f1 > f2 {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    Ok(best)
}
