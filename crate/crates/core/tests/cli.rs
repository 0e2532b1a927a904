use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sps_core::cli::{parse_config, run_command, GridConfig};
use sps_core::mesh::spsf::{load_field, save_field};
use sps_core::{Error, PotentialSpec};

const BASE: &str = "\
[problem]
p = 4
a = 0.5

[grid]
kind = radial
n = 1024
widths = 40
";

fn sps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sps")).args(args).env("SPS_THREADS", "2").output().unwrap()
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, format!("{BASE}{extra}")).unwrap();
    path.to_str().unwrap().to_string()
}

fn config_error(text: &str) -> (usize, String) {
    match parse_config(text) {
        Err(Error::Config { line, message }) => (line, message),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn minimal_config_defaults() {
    let cfg = parse_config(BASE).unwrap();
    assert_eq!((cfg.params.p, cfg.params.a, cfg.params.s), (4.0, 0.5, 1.0));
    assert_eq!(cfg.potential, PotentialSpec::Zero);
    assert_eq!(cfg.grid, GridConfig::RadialAuto { n: 1024, widths: 40.0 });
    assert!(cfg.solver.legs.legs.is_empty() && cfg.sweep.is_empty());
}

#[test]
fn potential_sections() {
    let cfg =
        parse_config(&format!("{BASE}[potential]\nkind = gaussian_well\nc = 0.1\nsigma = 1\nscale = 2\n")).unwrap();
    let want = PotentialSpec::GaussianWell { c: 0.1, sigma: 1.0 }.scaled(2.0);
    assert_eq!(cfg.potential, want);
    let cfg = parse_config(&format!(
        "{BASE}[potential]\nkind = angular_modulated\nbase = power_decay\nc = 1\nalpha = 0.5\namplitude = 0.2\n"
    ))
    .unwrap();
    assert!(matches!(cfg.potential, PotentialSpec::AngularModulated { amplitude, .. } if amplitude == 0.2));
}

#[test]
fn rejects_p_outside_the_mass_supercritical_range() {
    let (line, msg) = config_error("[problem]\np = 6\na = 1\n[grid]\nn = 64\nr_max = 10\n");
    assert_eq!(line, 2);
    assert_eq!(msg, "p must lie in the open interval (10/3, 6)");
    config_error("[problem]\np = 3.2\na = 1\n[grid]\nn = 64\nr_max = 10\n");
}

#[test]
fn rejects_duplicates_unknowns_and_ranges() {
    let (line, msg) = config_error("[problem]\np = 4\na = 1\np = 5\n[grid]\nn = 64\nr_max = 10\n");
    assert_eq!(line, 4);
    assert!(msg.contains("duplicate key 'p'") && msg.contains("line 2"), "{msg}");
    let (line, msg) = config_error(&format!("{BASE}[problem]\n"));
    assert!(line > 0 && msg.contains("duplicate section"));
    let (_, msg) = config_error("[problem]\np = 4\na = 1\ns = 0.3\n[grid]\nn = 64\nr_max = 10\n");
    assert_eq!(msg, "s must lie in [1/2, 1]");
    let (_, msg) = config_error(&format!("{BASE}[potential]\nkind = yukawa\n"));
    assert_eq!(msg, "unknown potential kind 'yukawa'");
    let (_, msg) = config_error(&format!("{BASE}[potential]\nkind = power_decay\nc = 1\nalpha = 1\nsigma = 2\n"));
    assert!(msg.contains("does not apply"));
    let (_, msg) = config_error(&format!("{BASE}[solver]\nlegs = v:0:2:1\n"));
    assert!(msg.contains("[0, 1]"));
    let (line, _) = config_error(&format!("{BASE}[extras]\n"));
    assert_eq!(line, 9);
    assert!(matches!(parse_config("[grid]\nn = 4\nr_max = 1\n"), Err(Error::ConfigGeneral(_))));
}

#[test]
fn solve_writes_artifacts_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[output]\nemit_svg = true\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = sps(&["solve", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["solution.spsf", "trace.csv", "diagnostics.txt", "profile.svg", "fiber.svg"] {
        assert!(a.join(f).exists(), "{f} missing");
    }
    assert_eq!(fs::read(a.join("trace.csv")).unwrap(), fs::read(b.join("trace.csv")).unwrap());
    assert_eq!(fs::read(a.join("solution.spsf")).unwrap(), fs::read(b.join("solution.spsf")).unwrap());
    let trace = fs::read_to_string(a.join("trace.csv")).unwrap();
    assert!(trace.starts_with("step,leg,value,level,lambda,residual_norm,converged\n0,ground,"));
    assert!(fs::read_to_string(a.join("profile.svg")).unwrap().starts_with("<?xml"));

    // the stored field verifies against its own config
    let field = a.join("solution.spsf");
    let o = sps(&["verify", &cfg, field.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("lambda_positive = true"));

    let u = load_field(&field).unwrap();
    let copy = dir.path().join("copy.spsf");
    save_field(&u, &copy).unwrap();
    assert_eq!(fs::read(&copy).unwrap(), fs::read(&field).unwrap());
}

#[test]
fn verify_rejects_a_bad_field_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let bad = dir.path().join("bad.spsf");
    fs::write(&bad, b"NOPE\0\0\0\0\0\0\0\0").unwrap();
    let o = sps(&["verify", &cfg, bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let p6 = dir.path().join("p6.cfg");
    fs::write(&p6, "[problem]\np = 6\na = 1\n[grid]\nn = 64\nr_max = 10\n").unwrap();
    let o = sps(&["solve", p6.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(run_command(["sps", "solve", "/nonexistent/run.cfg"]), 2);
    assert_eq!(run_command(["sps", "frobnicate"]), 2);
    // spacing coarser than the ground state
    let coarse = dir.path().join("coarse.cfg");
    fs::write(&coarse, "[problem]\np = 4\na = 0.5\n[grid]\nn = 2048\nr_max = 30\n").unwrap();
    let o = sps(&["solve", coarse.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not resolve"));
}

#[test]
fn constants_output() {
    let o = sps(&["constants", "--p", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let value = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("{key} missing"));
        line.split(" = ").nth(1).unwrap().parse().unwrap()
    };
    assert!((value("S =") - 5.4785).abs() < 1e-3);
    assert_eq!(value("eta_tilde ="), 6.0);
    assert_eq!(value("theta(0) ="), 0.0);
    let with_star = sps(&["constants", "--c-hat", "1", "--delta", "0.5"]);
    assert!(!String::from_utf8(with_star.stdout).unwrap().contains("n/a"));
}

#[test]
fn sweep_and_mass_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[sweep]\na = 0.4, 0.6\n");
    let o = sps(&["sweep", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("a,c_a,lambda_a,A,Bh,E,pohozaev_residual,converged\n"));
    let table = dir.path().join("sweep.csv");
    fs::write(&table, &csv).unwrap();
    let svg = dir.path().join("mass.svg");
    let o = sps(&["plot", &cfg, "--kind", "mass", "--table", table.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn check_potential_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[potential]\nkind = gaussian_well\nc = 0.1\nsigma = 1\n");
    let o = sps(&["check-potential", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["V1", "V3", "V4"] {
        assert!(text.contains(name), "{name} missing in\n{text}");
    }
}
