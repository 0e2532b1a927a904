mod common;

use common::{random_smooth, rel};
use proptest::prelude::*;
use sps_core::cli::parse_config;
use sps_core::cli::svg::{line_chart, Series};
use sps_core::coulomb::{solve_phi, CoulombSolverConfig};
use sps_core::energy::{energy_breakdown, fiber_profile, j_v, pohozaev};
use sps_core::mesh::spsf::{read_field, write_field};
use sps_core::mesh::{make_radial_grid, rescale, RadialGrid};
use sps_core::potentials::{check_v1, potential_norms};
use sps_core::solver::{HomotopyLeg, LegKind};
use sps_core::{Field, PotentialSpec, ProblemParams};

fn grid() -> RadialGrid {
    make_radial_grid(10.0, 400).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fiber_profile_is_the_energy_along_the_fiber(seed in 0u64..10_000, t in 0.2f64..5.0, p in 3.4f64..5.9) {
        let u = random_smooth(&grid(), seed);
        let pp = ProblemParams::new(p, 1.0).unwrap();
        let v = PotentialSpec::PowerDecay { c: 0.5, alpha: 1.5 };
        let direct = j_v(&rescale(&u, t).unwrap(), &v, &pp).unwrap();
        prop_assert!(rel(fiber_profile(&u, &v, &pp, t).unwrap(), direct) < 1e-9);
    }

    #[test]
    fn fiber_maximizer_lies_on_the_pohozaev_set(seed in 0u64..10_000, p in 3.4f64..5.9) {
        let u = random_smooth(&grid(), seed);
        let pp = ProblemParams::new(p, 1.0).unwrap();
        let b = energy_breakdown(&u, &PotentialSpec::Zero, &pp).unwrap();
        let t = b.fiber_stationary(&pp).unwrap();
        let ut = rescale(&u, t).unwrap();
        let a = energy_breakdown(&ut, &PotentialSpec::Zero, &pp).unwrap().grad_sq;
        prop_assert!(pohozaev(&ut, &PotentialSpec::Zero, &pp).unwrap().abs() < 1e-9 * a);
    }

    #[test]
    fn energy_terms_are_homogeneous_in_the_amplitude(seed in 0u64..10_000, c in 0.1f64..4.0, p in 3.4f64..5.9) {
        let u = random_smooth(&grid(), seed);
        let pp = ProblemParams::new(p, 1.0).unwrap();
        let v = PotentialSpec::GaussianWell { c: 1.0, sigma: 2.0 };
        let b1 = energy_breakdown(&u, &v, &pp).unwrap();
        let b2 = energy_breakdown(&u.scaled(c).unwrap(), &v, &pp).unwrap();
        prop_assert!(rel(b2.grad_sq, c * c * b1.grad_sq) < 1e-12);
        prop_assert!(rel(b2.potential, c * c * b1.potential) < 1e-12);
        prop_assert!(rel(b2.hartree, c.powi(4) * b1.hartree) < 1e-10);
        prop_assert!(rel(b2.nonlinear, c.powf(p) * b1.nonlinear) < 1e-12);
    }

    #[test]
    fn coulomb_potential_is_linear_in_the_density(s1 in 0u64..10_000, s2 in 0u64..10_000) {
        let g = grid();
        let cfg = CoulombSolverConfig::default();
        let (u, v) = (random_smooth(&g, s1), random_smooth(&g, s2));
        let w = Field::from_radial_fn(&g, |_| 0.0).unwrap()
            .with_values(u.values().iter().zip(v.values()).map(|(a, b)| (a * a + b * b).sqrt()).collect())
            .unwrap();
        let (pu, pv, pw) = (solve_phi(&u, &cfg).unwrap(), solve_phi(&v, &cfg).unwrap(), solve_phi(&w, &cfg).unwrap());
        for i in (0..g.len()).step_by(13) {
            let sum = pu.values()[i] + pv.values()[i];
            prop_assert!((pw.values()[i] - sum).abs() < 1e-11 * sum);
        }
    }

    #[test]
    fn spsf_round_trip(vals in prop::collection::vec(-1e6f64..1e6, 2..300), r_max in 0.5f64..100.0) {
        let g = make_radial_grid(r_max, vals.len() + 1).unwrap();
        let u = Field::new(g, vals).unwrap();
        let mut buf = Vec::new();
        write_field(&u, &mut buf).unwrap();
        let back = read_field(buf.as_slice()).unwrap();
        prop_assert_eq!(back.values(), u.values());
        prop_assert_eq!(back.mesh(), u.mesh());
    }

    #[test]
    fn leg_values_hit_both_end_points(from in 0.0f64..1.0, to in 0.0f64..1.0, steps in 1usize..50) {
        let leg = HomotopyLeg::new(LegKind::Potential, from, to, steps).unwrap();
        let vals = leg.values();
        prop_assert_eq!(vals.len(), steps + 1);
        prop_assert_eq!(vals[0], from);
        prop_assert!((vals[steps] - to).abs() < 1e-15);
    }

    #[test]
    fn config_accepts_exactly_the_supercritical_range(p in 2.0f64..7.0) {
        let text = format!("[problem]\np = {p}\na = 1\n[grid]\nn = 64\nr_max = 10\n");
        let ok = p > 10.0 / 3.0 && p < 6.0;
        prop_assert_eq!(parse_config(&text).is_ok(), ok);
    }

    #[test]
    fn v1_margin_sign_matches_verdict(c in 0.0f64..50.0, c_a in 1.0f64..1000.0, theta in 0.05f64..0.95) {
        let n = potential_norms(&PotentialSpec::PowerDecay { c: c + 1e-9, alpha: 2.0 }, 3.0).unwrap();
        let rep = check_v1(&n, 0.5, c_a, theta, 0.3, 4.5).unwrap();
        prop_assert_eq!(rep.verdict, rep.margin > 0.0);
        prop_assert_eq!(rep.margin, rep.details.iter().map(|d| d.1).fold(f64::INFINITY, f64::min));
    }

    #[test]
    fn svg_charts_are_well_formed(ys in prop::collection::vec(-1e3f64..1e3, 0..40), log_x in any::<bool>()) {
        let points = ys.iter().enumerate().map(|(i, y)| ((i + 1) as f64, *y)).collect();
        let svg = line_chart("t <&>", "x", "y", &[Series { name: "s".into(), points }], log_x);
        prop_assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
        prop_assert!(!svg.contains("NaN") && !svg.contains("inf"));
        prop_assert!(svg.contains("t &lt;&amp;&gt;"));
    }
}
