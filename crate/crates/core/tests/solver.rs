mod common;

use common::rel;
use sps_core::energy::fiber_stationary;
use sps_core::mesh::{make_box_grid, make_radial_grid};
use sps_core::solver::{
    auto_radial_grid, continuation, enforce_nonneg, gaussian_fiber_width, ground_state, ground_state_with,
    mp_path_level, newton_refine, GroundStateOptions, HomotopyLeg, HomotopySchedule, LegKind, NewtonOptions,
};
use sps_core::{Error, Grid, PotentialSpec, ProblemParams};

fn params() -> ProblemParams {
    ProblemParams::new(4.0, 0.5).unwrap()
}

#[test]
fn gaussian_fiber_width_at_the_reference_mass() {
    let w = gaussian_fiber_width(&params()).unwrap();
    assert!((w - 7.9346e-3).abs() < 1e-7, "{w}");
    // larger mass spreads the ground state
    assert!(gaussian_fiber_width(&params().with_a(1.0).unwrap()).unwrap() > w);
}

#[test]
fn radial_ground_state_is_a_positive_pohozaev_solution() {
    let pp = params();
    let sol = ground_state(&pp, auto_radial_grid(&pp, 4096, 40.0).unwrap()).unwrap();
    assert!(sol.converged);
    let b = &sol.breakdown;
    assert!(rel(b.mass, 0.25) < 1e-12);
    assert!(sol.lambda > 0.0);
    assert!(sol.pohozaev_residual.abs() < 1e-4 * b.grad_sq);
    assert!((fiber_stationary(&sol.u, &pp).unwrap() - 1.0).abs() < 1e-4);
    assert!(sol.u.values().iter().all(|x| *x >= -1e-10 * sol.u.max_abs()));
    // peak at the origin, decreasing outward
    let v = sol.u.values();
    assert!(v.windows(2).take(v.len() / 2).all(|w| w[1] <= w[0] + 1e-12 * v[0]));
    // at p = 4, J - (A + B)/6 = P/3
    assert!((sol.level() - (b.grad_sq + b.hartree) / 6.0 - b.pohozaev(&pp) / 3.0).abs() < 1e-12 * sol.level());
}

#[test]
fn seeds_land_on_the_same_state() {
    let pp = params();
    let grid = auto_radial_grid(&pp, 2048, 40.0).unwrap();
    let base = ground_state(&pp, grid).unwrap();
    for seed in [3, 17] {
        let opts = GroundStateOptions { seed: Some(seed), ..GroundStateOptions::default() };
        let s = ground_state_with(&pp, grid, &opts).unwrap();
        assert!(s.converged);
        assert!(rel(s.level(), base.level()) < 1e-9);
    }
}

#[test]
fn unresolved_grids_are_rejected() {
    let pp = params();
    match ground_state(&pp, make_radial_grid(30.0, 2048).unwrap()) {
        Err(Error::InvalidGrid(msg)) => assert!(msg.contains("does not resolve")),
        other => panic!("expected InvalidGrid, got {other:?}"),
    }
    let tiny = make_radial_grid(2.0 * gaussian_fiber_width(&pp).unwrap(), 2048).unwrap();
    assert!(matches!(ground_state(&pp, tiny), Err(Error::InvalidGrid(_))));
}

#[test]
fn box_ground_state_approaches_radial_level() {
    let pp = ProblemParams::new(4.0, 1.5).unwrap();
    let sigma = gaussian_fiber_width(&pp).unwrap();
    let radial = ground_state(&pp, auto_radial_grid(&pp, 4096, 40.0).unwrap()).unwrap();
    let cube = ground_state(&pp, Grid::Box(make_box_grid(8.0 * sigma, 32).unwrap())).unwrap();
    assert!(cube.converged && cube.lambda > 0.0);
    // two nodes per width: the discrete Laplacian underestimates the gradient energy
    let err = rel(cube.level(), radial.level());
    assert!(cube.level() < radial.level() && err < 0.15, "{err}");
}

#[test]
fn newton_refine_returns_to_the_solution() {
    let pp = params();
    let sol = ground_state(&pp, auto_radial_grid(&pp, 2048, 40.0).unwrap()).unwrap();
    let bumped = sol.u.map(|x| x * 1.01).unwrap();
    let again = newton_refine(&bumped, 0.9 * sol.lambda, &PotentialSpec::Zero, &pp, &NewtonOptions::default()).unwrap();
    assert!(again.converged);
    assert!(rel(again.level(), sol.level()) < 1e-9);
    assert!(rel(again.lambda, sol.lambda) < 1e-8);
}

#[test]
fn potential_leg_tracks_amplitudes() {
    let pp = params();
    let seed = ground_state(&pp, auto_radial_grid(&pp, 2048, 40.0).unwrap()).unwrap();
    let v = PotentialSpec::PowerDecay { c: 100.0, alpha: 2.0 };
    let schedule = HomotopySchedule::new(vec!["v:0:1:3".parse().unwrap()]);
    let sol = continuation(&schedule, &pp, &v, &seed, &NewtonOptions::default()).unwrap();
    assert!(sol.converged);
    let values: Vec<f64> = sol.trace.iter().map(|t| t.value).collect();
    assert_eq!(values.len(), 4);
    assert!(values[0] == 0.0 && rel(values[3], 1.0) < 1e-12);
    // a positive potential raises the level
    let levels: Vec<f64> = sol.trace.iter().map(|t| t.level).collect();
    assert!(levels.windows(2).all(|w| w[1] > w[0]));
    assert!(rel(levels[0], seed.level()) < 1e-9);
    assert!(sol.trace.iter().all(|t| t.leg == LegKind::Potential && t.converged));
}

#[test]
fn nonlinearity_leg_reaches_full_strength() {
    let pp = params();
    let start = pp.with_s(0.8).unwrap();
    let seed = ground_state(&start, auto_radial_grid(&pp, 2048, 40.0).unwrap()).unwrap();
    let schedule = HomotopySchedule::new(vec!["s:0.8:1:2".parse().unwrap()]);
    let sol = continuation(&schedule, &pp, &PotentialSpec::Zero, &seed, &NewtonOptions::default()).unwrap();
    assert!(sol.converged);
    assert_eq!(sol.params.s, 1.0);
    let direct = ground_state(&pp, auto_radial_grid(&pp, 2048, 40.0).unwrap()).unwrap();
    assert!(rel(sol.level(), direct.level()) < 1e-3);
}

#[test]
fn leg_parsing() {
    let leg: HomotopyLeg = "r:8:16:2".parse().unwrap();
    assert_eq!(leg, HomotopyLeg::new(LegKind::Radius, 8.0, 16.0, 2).unwrap());
    assert_eq!(leg.values(), vec![8.0, 12.0, 16.0]);
    for bad in ["s:0.2:1:3", "v:0:2:3", "r:16:8:2", "x:0:1:1", "v:0:1", "v:0:1:0", "v:a:1:2"] {
        assert!(bad.parse::<HomotopyLeg>().is_err(), "{bad}");
    }
}

#[test]
fn mountain_pass_path_bounds_the_level() {
    let pp = params();
    let sol = ground_state(&pp, auto_radial_grid(&pp, 2048, 40.0).unwrap()).unwrap();
    let mp = mp_path_level(&sol.u, &PotentialSpec::Zero, &pp).unwrap();
    assert!(mp >= sol.level() - 1e-9 * sol.level());
    assert!(rel(mp, sol.level()) < 1e-6);
}

#[test]
fn enforce_nonneg_restores_mass_and_sign() {
    let g = make_radial_grid(5.0, 200).unwrap();
    let u = common::random_smooth(&g, 1).map(|x| x - 0.3).unwrap();
    let v = enforce_nonneg(&u, 0.5).unwrap();
    assert!(v.values().iter().all(|x| *x >= 0.0));
    assert!(rel(v.mass(), 0.25) < 1e-12);
}
