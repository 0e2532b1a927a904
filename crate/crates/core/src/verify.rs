//! Diagnostics for computed solutions, the mass sweep and the scaling-law
//! suite.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::coulomb::{hartree_b, CoulombSolverConfig};
use crate::energy::{gn_quotient, hls_quotient, pohozaev_alt, Evaluator, ProblemParams};
use crate::error::{invalid, Error, Result};
use crate::mesh::{grad_sq, lp_norm, rescale, Field, Grid};
use crate::potentials::PotentialSpec;
use crate::solver::{auto_radial_grid, ground_state_with, GroundStateOptions, Solution};

/// Thresholds used by [`diagnostics`]; echoed in the report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance of the level and multiplier relations.
    pub energy_system: f64,
    /// `|P| ≤ max(pohozaev·A, pohozaev_h2·h²)`.
    pub pohozaev: f64,
    pub pohozaev_h2: f64,
    /// `ibp_gap ≤ ibp·(A + |C|)`.
    pub ibp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { energy_system: 1e-8, pohozaev: 1e-6, pohozaev_h2: 0.0, ibp: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub pohozaev_residual: f64,
    pub pohozaev_alt_residual: f64,
    pub ibp_gap: f64,
    pub lambda: f64,
    pub lambda_positive: bool,
    /// Closures of `2J = 2m`, `P = 0` and `λ‖u‖² = sE - A - C - B`.
    pub energy_system_residuals: [f64; 3],
    /// `A + E + |C| + B + |λ| ‖u‖²`, the scale of the closures.
    pub energy_scale: f64,
    pub grad_sq: f64,
    pub level: f64,
    pub level_vs_ca: f64,
    pub min_value: f64,
    pub max_value: f64,
    /// Least-squares slope of `log(r u)` over `[0.6, 0.9]·r_max`.
    pub tail_slope: f64,
    pub moser_ratio: f64,
    pub spacing: f64,
    pub tolerances: Tolerances,
    pub energy_system_ok: bool,
    pub pohozaev_ok: bool,
    pub ibp_ok: bool,
}

impl DiagnosticsReport {
    /// Level and multiplier closures, Pohozaev and `λ > 0`.
    pub fn passed(&self) -> bool {
        self.energy_system_ok && self.pohozaev_ok && self.lambda_positive
    }

    pub fn write_kv(&self, mut out: impl Write) -> Result<()> {
        write!(out, "{self}")?;
        Ok(())
    }
}

impl fmt::Display for DiagnosticsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.tolerances;
        let [r1, r2, r3] = self.energy_system_residuals;
        let rows: [(&str, String); 24] = [
            ("pohozaev_residual", e(self.pohozaev_residual)),
            ("pohozaev_alt_residual", e(self.pohozaev_alt_residual)),
            ("ibp_gap", e(self.ibp_gap)),
            ("lambda", e(self.lambda)),
            ("lambda_positive", self.lambda_positive.to_string()),
            ("energy_residual_level", e(r1)),
            ("energy_residual_pohozaev", e(r2)),
            ("energy_residual_lambda", e(r3)),
            ("energy_scale", e(self.energy_scale)),
            ("grad_sq", e(self.grad_sq)),
            ("level", e(self.level)),
            ("level_vs_ca", e(self.level_vs_ca)),
            ("min_value", e(self.min_value)),
            ("max_value", e(self.max_value)),
            ("tail_slope", e(self.tail_slope)),
            ("moser_ratio", e(self.moser_ratio)),
            ("spacing", e(self.spacing)),
            ("tol_energy_system", e(t.energy_system)),
            ("tol_pohozaev", e(t.pohozaev)),
            ("tol_pohozaev_h2", e(t.pohozaev_h2)),
            ("tol_ibp", e(t.ibp)),
            ("energy_system_ok", self.energy_system_ok.to_string()),
            ("pohozaev_ok", self.pohozaev_ok.to_string()),
            ("ibp_ok", self.ibp_ok.to_string()),
        ];
        for (k, v) in rows {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

fn e(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn diagnostics(sol: &Solution, v: &PotentialSpec, c_a_ref: f64) -> Result<DiagnosticsReport> {
    diagnostics_with(sol, v, c_a_ref, &Tolerances::default())
}

pub fn diagnostics_with(
    sol: &Solution,
    v: &PotentialSpec,
    c_a_ref: f64,
    tol: &Tolerances,
) -> Result<DiagnosticsReport> {
    if !sol.converged {
        return Err(Error::Solver("diagnostics need a converged solution".into()));
    }
    let pp = sol.params;
    let u = &sol.u;
    let mut ev = Evaluator::new(v, &pp, &CoulombSolverConfig::default())?;
    let b = ev.breakdown(u)?;
    let level = b.energy(&pp);
    let poh = b.pohozaev(&pp);
    let poh_alt = pohozaev_alt(u, v, &pp)?;
    let (a_, bh, c, e_, m) = (b.grad_sq, b.hartree, b.potential, b.nonlinear, b.mass);
    let s = pp.s;
    let r1 = 2.0 * sol.level() - (a_ + c + 0.5 * bh - 2.0 * s * e_ / pp.p);
    let r3 = sol.lambda * m - (s * e_ - a_ - c - bh);
    let scale = a_ + e_ + c.abs() + bh + sol.lambda.abs() * m;
    let h = u.spacing();
    let ibp_gap = (poh - poh_alt).abs();
    let max_value = u.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_value = u.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let l6 = lp_norm(u, 6.0)?;
    let moser = u.max_abs() / l6.max(l6.powf(1.0 + (pp.p - 2.0) / (6.0 - pp.p)));
    Ok(DiagnosticsReport {
        pohozaev_residual: poh,
        pohozaev_alt_residual: poh_alt,
        ibp_gap,
        lambda: sol.lambda,
        lambda_positive: sol.lambda > 0.0,
        energy_system_residuals: [r1, poh, r3],
        energy_scale: scale,
        grad_sq: a_,
        level,
        level_vs_ca: level - c_a_ref,
        min_value,
        max_value,
        tail_slope: tail_slope(u)?,
        moser_ratio: moser,
        spacing: h,
        tolerances: *tol,
        energy_system_ok: r1.abs() <= tol.energy_system * scale && r3.abs() <= tol.energy_system * scale,
        pohozaev_ok: poh.abs() <= (tol.pohozaev * a_).max(tol.pohozaev_h2 * h * h),
        ibp_ok: ibp_gap <= tol.ibp * (a_ + c.abs()),
    })
}

/// Slope of `log(r u)` against `r` over `[0.6, 0.9]·r_max`.
pub fn tail_slope(u: &Field) -> Result<f64> {
    let mesh = u.mesh();
    let r_max = mesh.extent();
    let (lo, hi) = (0.6 * r_max, 0.9 * r_max);
    let mut pts = Vec::new();
    for (i, x) in u.values().iter().enumerate() {
        let r = mesh.radius(i);
        if r >= lo && r <= hi && *x > 0.0 {
            pts.push((r, (r * x).ln()));
        }
    }
    if pts.len() < 3 {
        return invalid("too few positive samples in the tail window");
    }
    Ok(least_squares_slope(&pts))
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// How the grid of each sweep entry is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepGrid {
    /// The same grid for every `a`.
    Fixed(Grid),
    /// Radial grid of `n` nodes over `extent_widths` Gaussian widths of each `a`.
    Auto { n: usize, extent_widths: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub a: f64,
    pub c_a: f64,
    pub lambda: f64,
    pub grad_sq: f64,
    pub hartree: f64,
    pub nonlinear: f64,
    pub pohozaev_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassSweep {
    pub rows: Vec<SweepRow>,
    /// `c_a` nonincreasing over the converged rows.
    pub monotone: bool,
}

impl MassSweep {
    pub const HEADER: [&'static str; 8] = ["a", "c_a", "lambda_a", "A", "Bh", "E", "pohozaev_residual", "converged"];

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(Self::HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.a.to_string(),
                r.c_a.to_string(),
                r.lambda.to_string(),
                r.grad_sq.to_string(),
                r.hartree.to_string(),
                r.nonlinear.to_string(),
                r.pohozaev_residual.to_string(),
                r.converged.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Autonomous ground states along an increasing mass ladder.
pub fn sweep_mass(
    a_list: &[f64],
    params: &ProblemParams,
    grid: SweepGrid,
    opts: &GroundStateOptions,
) -> Result<MassSweep> {
    if a_list.is_empty() {
        return invalid("empty mass list");
    }
    if a_list.windows(2).any(|w| w[1] < w[0]) {
        return invalid("mass list must be nondecreasing");
    }
    let solve = |&a: &f64| -> Result<SweepRow> {
        let pp = params.with_a(a)?;
        let g: Grid = match grid {
            SweepGrid::Fixed(g) => g,
            SweepGrid::Auto { n, extent_widths } => auto_radial_grid(&pp, n, extent_widths)?.into(),
        };
        let sol = ground_state_with(&pp, g, opts)?;
        Ok(SweepRow {
            a,
            c_a: sol.level(),
            lambda: sol.lambda,
            grad_sq: sol.breakdown.grad_sq,
            hartree: sol.breakdown.hartree,
            nonlinear: sol.breakdown.nonlinear,
            pohozaev_residual: sol.pohozaev_residual,
            converged: sol.converged,
        })
    };
    let rows = a_list.par_iter().map(solve).collect::<Result<Vec<_>>>()?;
    let good: Vec<f64> = rows.iter().filter(|r| r.converged).map(|r| r.c_a).collect();
    let monotone = good.windows(2).all(|w| w[1] <= w[0]);
    Ok(MassSweep { rows, monotone })
}

/// One scaling law at one dilation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCheck {
    pub law: &'static str,
    pub t: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub checks: Vec<ScalingCheck>,
    pub tol: f64,
}

impl ScalingReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.rel_err <= self.tol)
    }

    /// Laws with at least one violation, in order of appearance.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        for c in self.checks.iter().filter(|c| !(c.rel_err <= self.tol)) {
            if !out.contains(&c.law) {
                out.push(c.law);
            }
        }
        out
    }
}

pub const SCALING_DILATIONS: [f64; 3] = [0.3, 1.0, 3.0];

/// Mass, gradient, `L^p`, Hartree and quotient laws under `u ↦ u^t`.
pub fn scaling_identity_suite(u: &Field, p: f64) -> Result<ScalingReport> {
    scaling_identity_suite_with(u, p, rescale)
}

/// As [`scaling_identity_suite`] with a caller-supplied dilation.
pub fn scaling_identity_suite_with(
    u: &Field,
    p: f64,
    dilate: impl Fn(&Field, f64) -> Result<Field>,
) -> Result<ScalingReport> {
    if u.max_abs() == 0.0 {
        return invalid("zero field");
    }
    let cfg = CoulombSolverConfig::default();
    let mass = u.mass();
    let a = grad_sq(u);
    let e = lp_norm(u, p)?.powf(p);
    let b = hartree_b(u, &cfg)?;
    let gn = gn_quotient(u, p)?;
    let hls = hls_quotient(u)?;
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
    let mut checks = Vec::new();
    for t in SCALING_DILATIONS {
        let ut = dilate(u, t)?;
        let mut push = |law, err| checks.push(ScalingCheck { law, t, rel_err: err });
        push("mass", rel(ut.mass(), mass));
        push("gradient", rel(grad_sq(&ut), t * t * a));
        push("lp", rel(lp_norm(&ut, p)?.powf(p), t.powf(1.5 * (p - 2.0)) * e));
        push("hartree", rel(hartree_b(&ut, &cfg)?, t * b));
        push("gn_quotient", rel(gn_quotient(&ut, p)?, gn));
        push("hls_quotient", rel(hls_quotient(&ut)?, hls));
    }
    Ok(ScalingReport { checks, tol: 1e-8 })
}
