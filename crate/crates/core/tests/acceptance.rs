//! Acceptance battery: one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use common::{random_smooth, rel, Gaussian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sps_core::coulomb::{hartree_b, solve_phi, CoulombSolverConfig};
use sps_core::energy::{fiber_stationary, Evaluator};
use sps_core::mesh::{make_box_grid, make_radial_grid};
use sps_core::potentials::{aubin_talenti_s, check_v1, check_v3, check_v4, eta_tilde, potential_norms, theta_v1prime};
use sps_core::potentials::{embedding_constant_gaussian, PotentialNorms};
use sps_core::solver::{
    auto_radial_grid, continuation, ground_state, ground_state_with, mp_path_level, GroundStateOptions,
    HomotopySchedule, NewtonOptions,
};
use sps_core::verify::{diagnostics, scaling_identity_suite, sweep_mass, SweepGrid};
use sps_core::{Field, Mesh, PotentialSpec, ProblemParams, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn base() -> ProblemParams {
    ProblemParams::new(4.0, 0.5).unwrap()
}

fn scaling_suite() -> Result<Outcome> {
    let g = make_radial_grid(12.0, 600)?;
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    let mut fields: Vec<(String, Field)> =
        (0..20).map(|s| (format!("random {s}"), random_smooth(&g, 100 + s))).collect();
    for (a, sigma) in [(0.5, 0.6), (1.0, 1.0), (2.0, 1.7)] {
        fields.push((format!("gaussian σ={sigma}"), Gaussian { a, sigma }.field(&g)));
    }
    for (name, u) in &fields {
        let rep = scaling_identity_suite(u, 4.0)?;
        worst = rep.checks.iter().map(|c| c.rel_err).fold(worst, f64::max);
        if !rep.passed() {
            failed.push(format!("{name}: {:?}", rep.violations()));
        }
    }
    outcome(failed.is_empty(), format!("{} fields, worst rel err {worst:.1e} {}", fields.len(), failed.join("; ")))
}

fn coulomb_oracle() -> Result<Outcome> {
    let cfg = CoulombSolverConfig::default();
    let gs = Gaussian { a: 1.0, sigma: 1.0 };
    let radial = make_radial_grid(40.0, 4096)?;
    let b = hartree_b(&gs.field(&radial), &cfg)?;
    let b_err = rel(b, gs.hartree());

    let phi_r = solve_phi(&gs.field(&radial), &cfg)?;
    let cube = make_box_grid(8.0, 128)?;
    let ub = Field::from_profile(Mesh::unit(cube), |r| gs.value(r))?;
    let phi_b = solve_phi(&ub, &cfg)?;
    let h = radial.h();
    let pr = phi_r.values();
    let interp = |r: f64| {
        let x = (r / h - 1.0).max(0.0);
        let i = (x.floor() as usize).min(pr.len() - 2);
        let f = x - i as f64;
        (1.0 - f) * pr[i] + f * pr[i + 1]
    };
    let (mut worst, mut peak): (f64, f64) = (0.0, 0.0);
    for (i, v) in phi_b.values().iter().enumerate() {
        let r = ub.mesh().radius(i);
        worst = worst.max((v - interp(r)).abs());
        peak = peak.max(interp(r));
    }
    let box_err = worst / peak;
    outcome(b_err < 1e-6 && box_err <= 1e-4, format!("radial B rel err {b_err:.1e}, box 128³ vs radial {box_err:.1e}"))
}

/// `⟨G(u), d⟩` against `(J(u + εd) - J(u - εd)) / 2ε`.
fn gradient_check() -> Result<Outcome> {
    let pp = base();
    let radial = make_radial_grid(10.0, 400)?;
    let cube = make_box_grid(6.0, 16)?;
    let cases: Vec<(&str, PotentialSpec, bool)> = vec![
        ("zero", PotentialSpec::Zero, false),
        ("gaussian_well", PotentialSpec::GaussianWell { c: 1.0, sigma: 1.0 }, false),
        ("power_decay", PotentialSpec::PowerDecay { c: 1.0, alpha: 2.0 }, false),
        ("gaussian_well box", PotentialSpec::GaussianWell { c: 1.0, sigma: 1.0 }, true),
    ];
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (_, v, on_box) in &cases {
        let mut ev = Evaluator::new(v, &pp, &CoulombSolverConfig::default())?;
        let smooth = |seed: u64| -> Result<Field> {
            if *on_box {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let (c, w) =
                    ([r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)], r.gen_range(0.8..1.5));
                Field::from_point_fn(Mesh::unit(cube), move |x| {
                    let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2);
                    (-d2 / (w * w)).exp()
                })
            } else {
                Ok(random_smooth(&radial, seed))
            }
        };
        let u = smooth(1)?;
        let (g, _) = ev.first_variation(&u)?;
        let j = |f: &Field, ev: &mut Evaluator| -> Result<f64> { Ok(ev.breakdown(f)?.energy(&pp)) };
        for _ in 0..10 {
            let (s1, s2) = (rng.gen_range(10..10_000), rng.gen_range(10..10_000));
            let d = smooth(s1)?.axpy(-0.8, &smooth(s2)?)?;
            let analytic = u.mesh().dot(&g, d.values());
            let eps = 1e-4 * (u.mass() / d.mass()).sqrt();
            let jp = j(&u.axpy(eps, &d)?, &mut ev)?;
            let jm = j(&u.axpy(-eps, &d)?, &mut ev)?;
            let fd = (jp - jm) / (2.0 * eps);
            let gnorm = u.mesh().dot(&g, &g).sqrt() * d.mass().sqrt();
            worst = worst.max((fd - analytic).abs() / analytic.abs().max(1e-3 * gnorm));
        }
    }
    outcome(worst < 1e-6, format!("{} potentials x 10 directions, worst rel err {worst:.1e}", cases.len()))
}

fn autonomous_ground_state() -> Result<Outcome> {
    let pp = base();
    let grid = auto_radial_grid(&pp, 32768, 40.0)?;
    let sol = ground_state(&pp, grid)?;
    let a_ = sol.breakdown.grad_sq;
    let poh = sol.pohozaev_residual.abs() / a_;
    let t_star = fiber_stationary(&sol.u, &pp)?;
    let min_ratio = sol.u.values().iter().cloned().fold(f64::INFINITY, f64::min) / sol.u.max_abs();
    let mut spread: f64 = 0.0;
    let mut all_converged = sol.converged;
    for seed in 1..=5 {
        let opts = GroundStateOptions { seed: Some(seed), ..GroundStateOptions::default() };
        let s = ground_state_with(&pp, grid, &opts)?;
        all_converged &= s.converged;
        spread = spread.max(rel(s.level(), sol.level())).max(rel(s.lambda, sol.lambda));
    }
    let pass = all_converged
        && poh <= 1e-6
        && sol.lambda > 0.0
        && (t_star - 1.0).abs() <= 1e-6
        && min_ratio >= -1e-10
        && spread <= 1e-6;
    outcome(
        pass,
        format!(
            "c_a = {:.8}, λ = {:.6}, |P|/A = {poh:.1e}, t* - 1 = {:.1e}, min u/max u = {min_ratio:.1e}, seed spread {spread:.1e}",
            sol.level(),
            sol.lambda,
            t_star - 1.0
        ),
    )
}

fn mass_monotonicity() -> Result<Outcome> {
    let table = sweep_mass(
        &[0.3, 0.5, 0.8],
        &base(),
        SweepGrid::Auto { n: 16384, extent_widths: 40.0 },
        &GroundStateOptions::default(),
    )?;
    let levels: Vec<String> = table.rows.iter().map(|r| format!("c({}) = {:.6}", r.a, r.c_a)).collect();
    let all = table.rows.iter().all(|r| r.converged);
    outcome(all && table.monotone, levels.join(", "))
}

fn positive_potential() -> Result<Outcome> {
    let pp = base();
    let (p, a) = (pp.p, pp.a);
    let seed = ground_state(&pp, auto_radial_grid(&pp, 8192, 40.0)?)?;
    let c_a = seed.level();
    let (theta, eta) = (0.3, 0.3);
    let unit = potential_norms(&PotentialSpec::PowerDecay { c: 1.0, alpha: 2.0 }, 3.0)?;
    let c_max = (2.0 * theta * c_a / (a * a * unit.v_inf)).min(eta * c_a / (a * a * unit.w_inf));
    let v = PotentialSpec::PowerDecay { c: 0.5 * c_max, alpha: 2.0 };
    let norms = potential_norms(&v, 3.0)?;
    let v1 = check_v1(&norms, a, c_a, theta, eta, p)?;

    let legs = "v:0:1:4, r:8:16:2, r:16:24:1";
    let schedule = HomotopySchedule::new(legs.split(',').map(str::parse).collect::<Result<_>>()?);
    let sol = continuation(&schedule, &pp, &v, &seed, &NewtonOptions::default())?;

    // the multiplier identity with m_r ≥ c_a and m_r ≤ (1 + θ) c_a
    let theta_min = norms.v_inf * a * a / (2.0 * c_a);
    let den = (3.0 * p - 10.0) * a * a;
    let r_steps: Vec<&sps_core::solver::TraceEntry> =
        sol.trace.iter().filter(|t| t.leg == sps_core::solver::LegKind::Radius).collect();
    let b_max = sol.breakdown.hartree.max(seed.breakdown.hartree);
    let lam_lo =
        (2.0 * (6.0 - p) * c_a - 2.0 * (p - 2.0) * (norms.v_inf + norms.w_inf) * a * a - 4.0 * (p - 3.0) * b_max) / den;
    let lam_hi = (2.0 * (6.0 - p) * (1.0 + theta_min) * c_a + 2.0 * (p - 2.0) * norms.w_inf * a * a) / den;
    let in_bracket = r_steps.iter().all(|t| t.lambda > lam_lo && t.lambda < lam_hi);
    let a_bound =
        6.0 * (p - 2.0) / (3.0 * p - 10.0) * (1.0 + theta_min) * c_a + 4.0 * a * a * norms.w_inf / (3.0 * p - 10.0);
    let radii: Vec<f64> = r_steps.iter().map(|t| t.value).collect();
    let pass = v1.verdict
        && sol.converged
        && sol.trace.iter().all(|t| t.converged)
        && sol.lambda > 0.0
        && sol.level() >= c_a - 1e-3 * c_a
        && radii == [8.0, 12.0, 16.0, 24.0]
        && in_bracket
        && lam_lo > 0.0
        && sol.breakdown.grad_sq <= a_bound;
    outcome(
        pass,
        format!(
            "c = {:.2}, J_V - c_a = {:.4}, λ_r ∈ [{:.1}, {:.1}] ⊂ ({lam_lo:.1}, {lam_hi:.1}), A = {:.1} ≤ {a_bound:.1} (θ = {theta_min:.3}), radii {radii:?}",
            0.5 * c_max,
            sol.level() - c_a,
            r_steps.iter().map(|t| t.lambda).fold(f64::INFINITY, f64::min),
            r_steps.iter().map(|t| t.lambda).fold(f64::NEG_INFINITY, f64::max),
            sol.breakdown.grad_sq
        ),
    )
}

fn negative_potential() -> Result<Outcome> {
    let pp = base();
    let v = PotentialSpec::GaussianWell { c: 0.1, sigma: 1.0 };
    let v4 = check_v4(&potential_norms(&v, 3.0)?, pp.p)?;
    let v3 = check_v3(&v)?;
    let seed = ground_state(&pp, auto_radial_grid(&pp, 16384, 40.0)?)?;
    let c_a = seed.level();
    let schedule = HomotopySchedule::new(vec!["v:0:1:2".parse()?]);
    let sol = continuation(&schedule, &pp, &v, &seed, &NewtonOptions::default())?;
    let d = diagnostics(&sol, &v, c_a)?;
    let mp = mp_path_level(&seed.u, &v, &pp)?;
    let ibp_tol = 1e-8 * (d.grad_sq + sol.breakdown.potential.abs());
    let pass = v4.verdict
        && v3.verdict
        && sol.converged
        && d.lambda > 0.0
        && d.level > 0.0
        && d.level < c_a
        && mp < c_a
        && d.ibp_gap <= ibp_tol;
    outcome(
        pass,
        format!(
            "J_V = {:.8} < c_a = {c_a:.8}, mp path {mp:.8}, λ = {:.4}, ibp gap {:.1e} ≤ {ibp_tol:.1e}",
            d.level, d.lambda, d.ibp_gap
        ),
    )
}

fn pohozaev_order() -> Result<Outcome> {
    let pp = base();
    let mut pts = Vec::new();
    for n in [512, 1024, 2048, 4096] {
        let grid = auto_radial_grid(&pp, n, 40.0)?;
        let sol = ground_state(&pp, grid)?;
        if !sol.converged {
            return outcome(false, format!("n = {n} did not converge"));
        }
        pts.push((grid.h().ln(), sol.pohozaev_residual.abs().ln()));
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let order =
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let res: Vec<String> = pts.iter().map(|p| format!("{:.2e}", p.1.exp())).collect();
    outcome(order >= 1.8, format!("fitted order {order:.3}, |P| = [{}]", res.join(", ")))
}

fn tail_decay() -> Result<Outcome> {
    let pp = base();
    let short = ground_state(&pp, auto_radial_grid(&pp, 8192, 20.0)?)?;
    let long = ground_state(&pp, auto_radial_grid(&pp, 16384, 40.0)?)?;
    let slope = sps_core::verify::tail_slope(&long.u)?;
    let k = long.lambda.sqrt();
    let dev = (slope + k).abs() / k;
    let pass = short.converged && long.converged && dev <= 0.2;
    outcome(pass, format!("slope {slope:.3} vs -sqrt(λ) = {:.3} ({:.1}% off)", -k, 100.0 * dev))
}

fn constants() -> Result<Outcome> {
    let s = aubin_talenti_s();
    let eta = eta_tilde(4.0, &PotentialNorms::zero(3.0))?;
    let theta0 = theta_v1prime(0.0, 4.0, 3.0, embedding_constant_gaussian(3.0)?)?;
    let margins: Vec<f64> = [0.01, 0.03, 0.1, 0.3, 1.0, 3.0]
        .iter()
        .map(|&c| Ok(check_v4(&potential_norms(&PotentialSpec::GaussianWell { c, sigma: 1.0 }, 3.0)?, 4.0)?.margin))
        .collect::<Result<_>>()?;
    let flips = margins.first().is_some_and(|m| *m > 0.0) && margins.last().is_some_and(|m| *m < 0.0);
    let pass = (s - 5.4785).abs() <= 1e-3 && (eta - 6.0).abs() < 1e-12 && theta0 == 0.0 && flips;
    let ms: Vec<String> = margins.iter().map(|m| format!("{m:.3}")).collect();
    outcome(pass, format!("S = {s:.6}, η̃ = {eta}, ϑ(0) = {theta0}, V4 margins [{}]", ms.join(", ")))
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("scaling identities", Duration::from_secs(5), scaling_suite),
        ("Coulomb oracle", Duration::from_secs(60), coulomb_oracle),
        ("first-variation gradient check", Duration::from_secs(30), gradient_check),
        ("autonomous ground state", Duration::from_secs(300), autonomous_ground_state),
        ("mass monotonicity", Duration::from_secs(900), mass_monotonicity),
        ("nonnegative potential regime", Duration::from_secs(1200), positive_potential),
        ("nonpositive potential regime", Duration::from_secs(600), negative_potential),
        ("Pohozaev convergence order", Duration::from_secs(600), pohozaev_order),
        ("tail decay", Duration::from_secs(300), tail_decay),
        ("constants", Duration::from_secs(1), constants),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let res = run();
        let dt = t0.elapsed();
        let (pass, detail) = match res {
            Ok(o) => (o.pass && dt <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {:>2}: {name}: {detail} [{:.2?} of {:?}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            dt,
            budget
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
