//! Norms and admissibility reports for the built-in potentials.
//!
//! cargo run --release --example potential_checks

use sps_core::potentials::{
    check_v1prime, check_v2_sampled, check_v3, check_v4, embedding_constant_gaussian, eta_tilde, potential_norms,
    AssumptionReport,
};
use sps_core::PotentialSpec;

fn show(r: &AssumptionReport) {
    println!("  {:<4} {:<5} margin {:+.4e}", r.name, r.verdict, r.margin);
    for (k, v) in &r.details {
        println!("       {k:<32} {v:+.4e}");
    }
}

fn main() -> sps_core::Result<()> {
    let p = 4.5;
    let q = 3.0;
    let c_q = embedding_constant_gaussian(q)?;
    let catalog = [
        ("power decay", PotentialSpec::PowerDecay { c: 0.05, alpha: 0.5 }),
        ("piecewise power", PotentialSpec::PiecewisePower { c: 0.02, alpha: 1.5, beta: 0.8 }),
        (
            "angular",
            PotentialSpec::AngularModulated {
                base: Box::new(PotentialSpec::PowerDecay { c: 0.05, alpha: 2.0 }),
                amplitude: 0.3,
            },
        ),
        ("gaussian well", PotentialSpec::GaussianWell { c: 0.05, sigma: 1.0 }),
    ];
    println!("p = {p}, q = {q}, C_q >= {c_q:.6}");
    for (name, v) in &catalog {
        let n = potential_norms(v, q)?;
        println!("{name}: {v:?}");
        println!(
            "  |V|inf {:.4e}  |V|q {:.4e}  |V|3/2 {:.4e}  |W|inf {:.4e}  |W|q {:.4e}  |W~|3 {:.4e}",
            n.v_inf, n.v_q, n.v_three_halves, n.w_inf, n.w_q, n.w_tilde_three
        );
        match eta_tilde(p, &n) {
            Ok(e) => println!("  eta_tilde {e:.6}"),
            Err(e) => println!("  eta_tilde: {e}"),
        }
        if n.v_q.is_finite() && n.w_q.is_finite() {
            show(&check_v1prime(&n, p, q, c_q)?);
        }
        show(&check_v3(v)?);
        show(&check_v4(&n, p)?);
        let v2 = check_v2_sampled(v, &[10.0, 20.0, 40.0, 80.0], 0.5, 0.25, 7)?;
        let maxima: Vec<String> = v2.maxima.iter().map(|m| format!("{m:+.3e}")).collect();
        println!("  V2 sampled maxima [{}] consistent {}", maxima.join(", "), v2.consistent);
    }
    Ok(())
}
