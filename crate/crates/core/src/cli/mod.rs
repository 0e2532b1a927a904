//! Batch front end of the `sps` binary.
//!
//! Exit codes: 0 success, 1 solver non-convergence, 2 configuration, format
//! or input errors.

mod config;
pub mod svg;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{
    load_config, parse_config, parse_config_in, read_table, CheckConfig, GridConfig, OutputConfig, RunConfig,
    SolverConfig,
};

use crate::energy::{fiber_profile, Evaluator, ProblemParams};
use crate::error::{Error, Result};
use crate::mesh::spsf::{load_field, save_field};
use crate::mesh::{Field, Grid};
use crate::potentials::{
    a_star, aubin_talenti_s, check_v1, check_v1prime, check_v2_sampled, check_v3, check_v4,
    embedding_constant_gaussian, eta_tilde, lambda_pq, potential_norms, theta_v1prime, AssumptionReport,
    PotentialNorms, PotentialSpec,
};
use crate::solver::{
    auto_radial_grid, continuation, ground_state_with, newton_refine, HomotopyLeg, HomotopySchedule, LegKind, Solution,
};
use crate::verify::{diagnostics, sweep_mass, MassSweep, SweepGrid};
use svg::{line_chart, Series};

#[derive(Debug, Parser)]
#[command(name = "sps", version, about = "Normalized Schrödinger–Poisson solutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground state, then continuation along the configured legs.
    Solve {
        config: PathBuf,
        /// Overrides `[output] directory`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Autonomous ground states over the `[sweep] a` ladder, as CSV.
    Sweep {
        config: PathBuf,
        /// Comma separated masses, overriding the config.
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<f64>>,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reload a stored field and rerun the diagnostics.
    Verify {
        config: PathBuf,
        field: PathBuf,
        /// Reference autonomous level; computed when absent.
        #[arg(long)]
        c_a: Option<f64>,
    },
    /// Admissibility reports of the configured potential.
    CheckPotential { config: PathBuf },
    /// Constants of the existence theory.
    Constants {
        /// Takes p and the potential from a config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        /// Argument of ϑ.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long, default_value_t = 3.0)]
        q: f64,
        /// Embedding constant; the Gaussian lower bound when absent.
        #[arg(long)]
        c_q: Option<f64>,
        #[arg(long)]
        c_hat: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// SVG charts.
    Plot {
        config: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotKind,
        /// Field for `profile` and `fiber`.
        #[arg(long)]
        field: Option<PathBuf>,
        /// Sweep CSV for `mass`.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// `u` and `φ_u` against the radius.
    Profile,
    /// `c_a` against `a`.
    Mass,
    /// `t ↦ J_V(u^t)`.
    Fiber,
}

/// Parses `argv` (program name first), runs and returns the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(cli.command, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Solver(_) => 1,
        _ => 2,
    }
}

/// Runs one subcommand, writing reports to `out`.
pub fn run(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Solve { config, out: dir } => {
            let mut cfg = load_config(&config)?;
            if let Some(d) = dir {
                cfg.output.directory = d;
            }
            cmd_solve(&cfg, out)
        }
        Command::Sweep { config, a, out: dest } => {
            let mut cfg = load_config(&config)?;
            if let Some(a) = a {
                cfg.sweep = a;
            }
            let table = cmd_sweep(&cfg)?;
            match dest {
                Some(p) => table.write_csv(fs::File::create(p)?)?,
                None => table.write_csv(&mut *out)?,
            }
            Ok(if table.rows.iter().all(|r| r.converged) { 0 } else { 1 })
        }
        Command::Verify { config, field, c_a } => {
            let cfg = load_config(&config)?;
            let u = load_field(&field)?;
            cmd_verify(&cfg, &u, c_a, out)
        }
        Command::CheckPotential { config } => {
            let cfg = load_config(&config)?;
            cmd_check_potential(&cfg, out)?;
            Ok(0)
        }
        Command::Constants { config, p, t, q, c_q, c_hat, delta } => {
            let (p, v) = match config {
                Some(path) => {
                    let cfg = load_config(path)?;
                    (cfg.params.p, cfg.potential)
                }
                None => (p, PotentialSpec::Zero),
            };
            cmd_constants(p, &v, t, q, c_q, c_hat, delta, out)?;
            Ok(0)
        }
        Command::Plot { config, kind, field, table, out: dest } => {
            let cfg = load_config(&config)?;
            let svg = cmd_plot(&cfg, kind, field.as_deref(), table.as_deref())?;
            fs::write(dest, svg)?;
            Ok(0)
        }
    }
}

/// Level of the autonomous ground state used as `c_a` for `params`.
fn reference_level(cfg: &RunConfig, params: &ProblemParams) -> Result<f64> {
    let grid = auto_radial_grid(params, cfg.solver.reference_n, 40.0)?;
    let sol = ground_state_with(params, grid, &cfg.solver.ground_state_options(None))?;
    if !sol.converged {
        return Err(Error::Solver("reference ground state did not converge".into()));
    }
    Ok(sol.level())
}

/// Ground state plus continuation; returns the solution and `c_a`.
pub fn solve_config(cfg: &RunConfig) -> Result<(Solution, f64)> {
    let mut legs = cfg.solver.legs.legs.clone();
    if !cfg.potential.is_zero() && !legs.iter().any(|l| l.kind == LegKind::Potential) {
        legs.insert(0, HomotopyLeg::new(LegKind::Potential, 0.0, 1.0, 4)?);
    }
    let s_start = legs.iter().find(|l| l.kind == LegKind::Nonlinearity).map_or(cfg.params.s, |l| l.from);
    let s_end = legs.iter().rev().find(|l| l.kind == LegKind::Nonlinearity).map_or(cfg.params.s, |l| l.to);
    let start = cfg.params.with_s(s_start)?;
    let grid = cfg.grid.build(&cfg.params)?;
    let seed = ground_state_with(&start, grid, &cfg.solver.ground_state_options(Some(cfg.output.seed)))?;
    if !seed.converged {
        return Ok((seed, f64::NAN));
    }
    let end = cfg.params.with_s(s_end)?;
    let c_a = if grid.is_radial() && s_start == s_end { seed.level() } else { reference_level(cfg, &end)? };
    if legs.is_empty() {
        return Ok((seed, c_a));
    }
    let mut seed = seed;
    seed.trace.clear();
    let sol = continuation(&HomotopySchedule::new(legs), &end, &cfg.potential, &seed, &cfg.solver.newton_options())?;
    Ok((sol, c_a))
}

fn write_trace(sol: &Solution, out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["step", "leg", "value", "level", "lambda", "residual_norm", "converged"])?;
    if sol.trace.is_empty() {
        w.write_record([
            "0".to_string(),
            "ground".to_string(),
            sol.params.a.to_string(),
            sol.level().to_string(),
            sol.lambda.to_string(),
            sol.residual_norm.to_string(),
            sol.converged.to_string(),
        ])?;
    }
    for (i, t) in sol.trace.iter().enumerate() {
        w.write_record([
            i.to_string(),
            t.leg.to_string(),
            t.value.to_string(),
            t.level.to_string(),
            t.lambda.to_string(),
            t.residual_norm.to_string(),
            t.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_solve(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (sol, c_a) = solve_config(cfg)?;
    let dir = &cfg.output.directory;
    fs::create_dir_all(dir)?;
    save_field(&sol.u, dir.join("solution.spsf"))?;
    write_trace(&sol, fs::File::create(dir.join("trace.csv"))?)?;
    writeln!(out, "converged = {}", sol.converged)?;
    writeln!(out, "iterations = {}", sol.iterations)?;
    writeln!(out, "residual_norm = {:.6e}", sol.residual_norm)?;
    writeln!(out, "c_a = {c_a:.12e}")?;
    if !sol.converged {
        eprintln!("error: the solver did not converge (residual {:.3e})", sol.residual_norm);
        return Ok(1);
    }
    let report = diagnostics(&sol, &cfg.potential, c_a)?;
    report.write_kv(fs::File::create(dir.join("diagnostics.txt"))?)?;
    report.write_kv(&mut *out)?;
    if cfg.output.emit_svg {
        fs::write(dir.join("profile.svg"), profile_chart(&sol.u)?)?;
        fs::write(dir.join("fiber.svg"), fiber_chart(&sol.u, &cfg.potential, &sol.params)?)?;
    }
    Ok(0)
}

fn cmd_sweep(cfg: &RunConfig) -> Result<MassSweep> {
    if cfg.sweep.is_empty() {
        return Err(Error::ConfigGeneral("no masses: set [sweep] a or pass --a".into()));
    }
    let grid = match cfg.grid {
        GridConfig::RadialAuto { n, widths } => SweepGrid::Auto { n, extent_widths: widths },
        g => SweepGrid::Fixed(g.build(&cfg.params)?),
    };
    sweep_mass(&cfg.sweep, &cfg.params, grid, &cfg.solver.ground_state_options(Some(cfg.output.seed)))
}

fn cmd_verify(cfg: &RunConfig, u: &Field, c_a: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let pp = cfg.params;
    let mut ev = Evaluator::new(&cfg.potential, &pp, &Default::default())?;
    let lambda0 = ev.breakdown(u)?.lagrange_multiplier(&pp);
    let sol = newton_refine(u, lambda0, &cfg.potential, &pp, &cfg.solver.newton_options())?;
    writeln!(out, "converged = {}", sol.converged)?;
    writeln!(out, "newton_iterations = {}", sol.iterations)?;
    if !sol.converged {
        eprintln!("error: the stored field is not a solution (residual {:.3e})", sol.residual_norm);
        return Ok(1);
    }
    let c_a = match c_a {
        Some(c) => c,
        None if cfg.potential.is_zero() => sol.level(),
        None => reference_level(cfg, &pp)?,
    };
    diagnostics(&sol, &cfg.potential, c_a)?.write_kv(&mut *out)?;
    Ok(0)
}

fn write_report(out: &mut dyn Write, r: &AssumptionReport) -> Result<()> {
    writeln!(out, "{}.verdict = {}", r.name, if r.verdict { "pass" } else { "fail" })?;
    writeln!(out, "{}.margin = {:.6e}", r.name, r.margin)?;
    for (k, v) in &r.details {
        writeln!(out, "{}.term[{k}] = {v:.6e}", r.name)?;
    }
    Ok(())
}

fn cmd_check_potential(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let (pp, v, ck) = (&cfg.params, &cfg.potential, &cfg.check);
    let norms = potential_norms(v, ck.q)?;
    write_norms(out, &norms)?;
    let c_a = reference_level(cfg, &pp.with_s(1.0)?)?;
    writeln!(out, "c_a = {c_a:.12e}")?;
    let c_q = match ck.c_q {
        Some(c) => c,
        None => embedding_constant_gaussian(ck.q)?,
    };
    write_report(out, &check_v1(&norms, pp.a, c_a, ck.theta, ck.eta, pp.p)?)?;
    write_report(out, &check_v1prime(&norms, pp.p, ck.q, c_q)?)?;
    if v.is_zero() {
        writeln!(out, "V2.verdict = skipped (zero potential)")?;
    } else {
        match check_v2_sampled(v, &ck.radii, ck.alpha, ck.delta, cfg.output.seed) {
            Ok(s) => {
                writeln!(out, "V2.verdict = {}", if s.consistent { "consistent" } else { "inconsistent" })?;
                for (r, m) in s.radii.iter().zip(&s.maxima) {
                    writeln!(out, "V2.max[r={r}] = {m:.6e}")?;
                }
            }
            Err(e) => writeln!(out, "V2.verdict = unavailable ({e})")?,
        }
    }
    write_report(out, &check_v3(v)?)?;
    write_report(out, &check_v4(&norms, pp.p)?)?;
    Ok(())
}

fn write_norms(out: &mut dyn Write, n: &PotentialNorms) -> Result<()> {
    writeln!(out, "norm.q = {}", n.q)?;
    writeln!(out, "norm.V_inf = {:.6e}", n.v_inf)?;
    writeln!(out, "norm.V_q = {:.6e}", n.v_q)?;
    writeln!(out, "norm.V_3/2 = {:.6e}", n.v_three_halves)?;
    writeln!(out, "norm.W_inf = {:.6e}", n.w_inf)?;
    writeln!(out, "norm.W_q = {:.6e}", n.w_q)?;
    writeln!(out, "norm.W~_3 = {:.6e}", n.w_tilde_three)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_constants(
    p: f64,
    v: &PotentialSpec,
    t: f64,
    q: f64,
    c_q: Option<f64>,
    c_hat: Option<f64>,
    delta: Option<f64>,
    out: &mut dyn Write,
) -> Result<()> {
    ProblemParams::new(p, 1.0)?;
    let norms = potential_norms(v, q)?;
    let c_q = match c_q {
        Some(c) => c,
        None => embedding_constant_gaussian(q)?,
    };
    let eta = eta_tilde(p, &norms)?;
    writeln!(out, "S = {:.10}", aubin_talenti_s())?;
    writeln!(out, "eta_tilde = {eta:.10}")?;
    writeln!(out, "C_q = {c_q:.10}")?;
    writeln!(out, "theta({t}) = {:.10}", theta_v1prime(t, p, q, c_q)?)?;
    writeln!(out, "Lambda_pq = {:.10}", lambda_pq(p, q, c_q)?)?;
    match (c_hat, delta) {
        (Some(c), Some(d)) => writeln!(out, "a_star = {:.10}", a_star(p, c, d, eta)?)?,
        _ => writeln!(out, "a_star = n/a (needs --c-hat and --delta)")?,
    }
    Ok(())
}

/// Samples of `u` along the radius: all nodes on a radial grid, the `x`-axis
/// line through the centre of a box.
fn radial_samples(u: &Field, values: &[f64]) -> Vec<(f64, f64)> {
    let mesh = u.mesh();
    match mesh.grid() {
        Grid::Radial(_) => (0..u.len()).map(|i| (mesh.radius(i), values[i])).collect(),
        Grid::Box(g) => {
            let n = g.n();
            let c = n / 2;
            (c..n).map(|i| g.index(i, c, c)).map(|idx| (mesh.point(idx)[0], values[idx])).collect()
        }
    }
}

fn profile_chart(u: &Field) -> Result<String> {
    let phi = crate::coulomb::solve_phi(u, &Default::default())?;
    Ok(line_chart(
        "solution profile",
        "r",
        "value",
        &[
            Series { name: "u".into(), points: radial_samples(u, u.values()) },
            Series { name: "phi_u".into(), points: radial_samples(u, phi.values()) },
        ],
        false,
    ))
}

fn fiber_chart(u: &Field, v: &PotentialSpec, pp: &ProblemParams) -> Result<String> {
    let mut pts = Vec::new();
    for k in 0..=200 {
        let t = 10f64.powf(-1.0 + 1.5 * k as f64 / 200.0);
        pts.push((t, fiber_profile(u, v, pp, t)?));
    }
    Ok(line_chart("fiber profile", "t", "J_V(u^t)", &[Series { name: "J_V(u^t)".into(), points: pts }], true))
}

fn mass_chart(table: &Path) -> Result<String> {
    let mut rdr = csv::Reader::from_path(table)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Format(format!("sweep table lacks '{name}'")))
    };
    let (ia, ic) = (col("a")?, col("c_a")?);
    let mut pts = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| {
            rec.get(i)
                .and_then(|x| x.parse::<f64>().ok())
                .ok_or_else(|| Error::Format("non-numeric entry in sweep table".into()))
        };
        pts.push((num(ia)?, num(ic)?));
    }
    Ok(line_chart("ground-state level", "a", "c_a", &[Series { name: "c_a".into(), points: pts }], false))
}

fn cmd_plot(cfg: &RunConfig, kind: PlotKind, field: Option<&Path>, table: Option<&Path>) -> Result<String> {
    let need = |p: Option<&Path>, what: &str| {
        p.map(Path::to_path_buf).ok_or_else(|| Error::InvalidArgument(format!("this plot needs --{what}")))
    };
    match kind {
        PlotKind::Profile => profile_chart(&load_field(need(field, "field")?)?),
        PlotKind::Fiber => fiber_chart(&load_field(need(field, "field")?)?, &cfg.potential, &cfg.params),
        PlotKind::Mass => mass_chart(&need(table, "table")?),
    }
}
