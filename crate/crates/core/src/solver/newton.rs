//! Bordered Newton–Krylov iteration on `(u, λ)`.

use super::linalg::{gmres, tridiag_solve, BoxShiftedLaplacian};
use super::{NewtonOptions, Solution};
use crate::energy::{EnergyBreakdown, Evaluator, ProblemParams};
use crate::error::{Error, Result};
use crate::mesh::{laplacian_into, Field, Grid, Mesh};
use crate::potentials::PotentialSpec;

/// Residual of the stationarity system at `(u, λ)`.
pub(crate) struct ResidualState {
    pub f: Vec<f64>,
    pub mass_defect: f64,
    pub phi: Vec<f64>,
    pub norm: f64,
    pub floor: f64,
}

/// Relative residual: `‖G(u) + λu‖ / Σ‖terms‖ + |‖u‖² - a²| / a²`.
pub(crate) fn residual(ev: &mut Evaluator, u: &Field, lambda: f64) -> Result<ResidualState> {
    let mesh = *u.mesh();
    let vals = u.values();
    let (p, s, a) = (ev.params().p, ev.params().s, ev.params().a);
    let phi = ev.phi(u)?;
    let mut lap = vec![0.0; vals.len()];
    laplacian_into(&mesh, vals, &mut lap);
    let v = if ev.spec().is_zero() { None } else { Some(ev.fields(&mesh)?.v.values().to_vec()) };
    let mut f = vec![0.0; vals.len()];
    let (mut t_lap, mut t_v, mut t_phi, mut t_nl) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..vals.len() {
        let w = mesh.weight(i);
        let x = vals[i];
        let vi = v.as_ref().map_or(0.0, |v| v[i]);
        let nl = s * x.abs().powf(p - 2.0) * x;
        f[i] = -lap[i] + (vi + phi[i] + lambda) * x - nl;
        t_lap += w * lap[i] * lap[i];
        t_v += w * (vi * x).powi(2);
        t_phi += w * (phi[i] * x).powi(2);
        t_nl += w * nl * nl;
    }
    let mass = mesh.dot(vals, vals);
    let scale = t_lap.sqrt() + t_v.sqrt() + t_phi.sqrt() + t_nl.sqrt() + lambda.abs() * mass.sqrt();
    let fnorm = mesh.dot(&f, &f).sqrt();
    let h = mesh.spacing();
    // rounding noise of the second difference
    let floor = 20.0 * f64::EPSILON * 4.0 / (h * h) * mass.sqrt() / scale.max(f64::MIN_POSITIVE);
    let mass_defect = mass - a * a;
    Ok(ResidualState {
        f,
        mass_defect,
        phi,
        norm: fnorm / scale.max(f64::MIN_POSITIVE) + mass_defect.abs() / (a * a),
        floor,
    })
}

enum Precond {
    Radial { sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64> },
    Box { op: BoxShiftedLaplacian, sigma: f64 },
}

impl Precond {
    fn build(mesh: &Mesh, u: &[f64], local: &[f64], lambda: f64) -> Self {
        let h = mesh.spacing();
        match mesh.grid() {
            Grid::Radial(_) => {
                let m = u.len();
                let ih2 = 1.0 / (h * h);
                let mut sub = vec![0.0; m];
                let mut diag = vec![0.0; m];
                let mut sup = vec![0.0; m];
                for i in 0..m {
                    let r = (i + 1) as f64;
                    if i > 0 {
                        sub[i] = -ih2 * i as f64 / r;
                    }
                    if i + 1 < m {
                        sup[i] = -ih2 * (i + 2) as f64 / r;
                    }
                    diag[i] = 2.0 * ih2 + local[i];
                }
                Precond::Radial { sub, diag, sup }
            }
            Grid::Box(g) => {
                let sigma = if lambda > 0.0 { lambda } else { 1.0 / (h * h) };
                Precond::Box { op: BoxShiftedLaplacian::new(g.n(), h), sigma }
            }
        }
    }

    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match self {
            Precond::Radial { sub, diag, sup } => {
                tridiag_solve(sub, diag, sup, rhs).ok_or_else(|| Error::Solver("singular local Jacobian".into()))
            }
            Precond::Box { op, sigma } => {
                let mut out = vec![0.0; rhs.len()];
                op.solve(*sigma, rhs, &mut out);
                Ok(out)
            }
        }
    }
}

/// Newton–Krylov refinement of `(u, λ)` at fixed potential and parameters.
pub(crate) fn refine(ev: &mut Evaluator, u0: &Field, lambda0: f64, opts: &NewtonOptions) -> Result<Solution> {
    let mut u = u0.clone();
    let mut lambda = lambda0;
    let mesh = *u.mesh();
    let a = ev.params().a;
    let (p, s) = (ev.params().p, ev.params().s);
    let n = u.len();
    let weights = mesh.weights();
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut state = residual(ev, &u, lambda)?;
    let mut best = (u.clone(), lambda, state.norm);
    let mut increases = 0;
    let mut iterations = 0;
    let mut converged = state.norm <= opts.tol.max(state.floor);
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let vals = u.values().to_vec();
        let v = if ev.spec().is_zero() { vec![0.0; n] } else { ev.fields(&mesh)?.v.values().to_vec() };
        let local: Vec<f64> =
            (0..n).map(|i| v[i] + state.phi[i] + lambda - s * (p - 1.0) * vals[i].abs().powf(p - 2.0)).collect();
        let pre = Precond::build(&mesh, &vals, &local, lambda);
        // bordering with the mass row: two local solves
        let x_u = pre.solve(&vals)?;
        let c: Vec<f64> = (0..n).map(|i| 2.0 * weights[i] * vals[i]).collect();
        let cx_u: f64 = c.iter().zip(&x_u).map(|(a, b)| a * b).sum();
        if cx_u == 0.0 || !cx_u.is_finite() {
            return Err(Error::Solver("singular projected Jacobian; restart from a homotopy".into()));
        }
        // rows scaled by √w (u-part) and 1/a (mass row)
        let precond = |r: &[f64], z: &mut [f64]| -> Result<()> {
            let r1: Vec<f64> = (0..n).map(|i| r[i] / sw[i]).collect();
            let r2 = r[n] * a;
            let x1 = pre.solve(&r1)?;
            let cx1: f64 = c.iter().zip(&x1).map(|(a, b)| a * b).sum();
            let dl = (cx1 - r2) / cx_u;
            for i in 0..n {
                z[i] = x1[i] - dl * x_u[i];
            }
            z[n] = dl;
            Ok(())
        };
        let coulomb_cfg = *ev.coulomb().config();
        let mut coulomb = crate::coulomb::CoulombSolver::new(coulomb_cfg)?;
        let apply = |z: &[f64], y: &mut [f64]| -> Result<()> {
            let du = &z[..n];
            let dl = z[n];
            let mut lap = vec![0.0; n];
            laplacian_into(&mesh, du, &mut lap);
            let dens: Vec<f64> = (0..n).map(|i| 2.0 * vals[i] * du[i]).collect();
            let dphi = coulomb.potential(&mesh, &dens)?;
            let mut mrow = 0.0;
            for i in 0..n {
                let ji = -lap[i] + local[i] * du[i] + dphi[i] * vals[i] + dl * vals[i];
                y[i] = sw[i] * ji;
                mrow += c[i] * du[i];
            }
            y[n] = mrow / a;
            Ok(())
        };
        let mut rhs: Vec<f64> = (0..n).map(|i| -sw[i] * state.f[i]).collect();
        rhs.push(-state.mass_defect / a);
        // no need to solve past what the target residual requires
        let target = 0.1 * opts.tol.max(state.floor) / state.norm;
        let rtol = (opts.forcing * state.norm).max(target).clamp(1e-13, 1e-2);
        let sol = gmres(apply, precond, &rhs, rtol, opts.max_krylov, opts.restart)?;
        if !sol.converged && sol.relative_residual > 0.5 {
            if iterations == 1 {
                return Err(Error::Solver(format!(
                    "linear solve stalled (relative residual {:.2e}); the projected Jacobian looks singular, restart from a homotopy",
                    sol.relative_residual
                )));
            }
            break;
        }
        // backtracking on the residual norm
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let cand: Vec<f64> = (0..n).map(|i| vals[i] + step * sol.x[i]).collect();
            if let Ok(cu) = u.with_values(cand) {
                let cl = lambda + step * sol.x[n];
                let st = residual(ev, &cu, cl)?;
                if st.norm.is_finite() && st.norm < (1.0 - 1e-4 * step) * state.norm {
                    accepted = Some((cu, cl, st));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((nu, nl, nst)) = accepted else {
            break;
        };
        if nst.norm >= state.norm {
            increases += 1;
        } else {
            increases = 0;
        }
        u = nu;
        lambda = nl;
        state = nst;
        if state.norm < best.2 {
            best = (u.clone(), lambda, state.norm);
        }
        if increases >= 5 {
            break;
        }
        converged = state.norm <= opts.tol.max(state.floor);
    }
    let (u, lambda, norm) = if converged { (u, lambda, state.norm) } else { best };
    finish(ev, u, lambda, norm, converged, iterations)
}

pub(crate) fn finish(
    ev: &mut Evaluator,
    u: Field,
    lambda: f64,
    residual_norm: f64,
    converged: bool,
    iterations: usize,
) -> Result<Solution> {
    let params: ProblemParams = *ev.params();
    let breakdown: EnergyBreakdown = ev.breakdown(&u)?;
    Ok(Solution {
        pohozaev_residual: breakdown.pohozaev(&params),
        u,
        lambda,
        params,
        potential: ev.spec().clone(),
        breakdown,
        residual_norm,
        converged,
        iterations,
        trace: Vec::new(),
    })
}

/// Newton refinement from an initial pair.
pub fn newton_refine(
    u0: &Field,
    lambda0: f64,
    v: &PotentialSpec,
    params: &ProblemParams,
    opts: &NewtonOptions,
) -> Result<Solution> {
    let mut ev = Evaluator::new(v, params, &opts.coulomb)?;
    refine(&mut ev, u0, lambda0, opts)
}
