use std::fmt;
use std::str::FromStr;

use super::{newton, NewtonOptions, Solution};
use crate::energy::{Evaluator, ProblemParams};
use crate::error::{invalid, Error, Result};
use crate::mesh::{BoxGrid, Field, Grid, Mesh};
use crate::potentials::PotentialSpec;

/// Parameter moved along one homotopy leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegKind {
    /// Strength `s` of the power nonlinearity.
    Nonlinearity,
    /// Outer radius at fixed spacing.
    Radius,
    /// Amplitude `ε` of the external potential.
    Potential,
}

impl fmt::Display for LegKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LegKind::Nonlinearity => "s",
            LegKind::Radius => "r",
            LegKind::Potential => "v",
        })
    }
}

/// `from → to` in `steps` equal increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomotopyLeg {
    pub kind: LegKind,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl HomotopyLeg {
    pub fn new(kind: LegKind, from: f64, to: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !from.is_finite() || !to.is_finite() {
            return invalid("a leg needs finite end points and at least one step");
        }
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        match kind {
            LegKind::Nonlinearity if !((0.5..=1.0).contains(&from) && (0.5..=1.0).contains(&to)) => {
                invalid("s must lie in [1/2, 1]")
            }
            LegKind::Potential if !(in_unit(from) && in_unit(to)) => invalid("potential amplitude must lie in [0, 1]"),
            LegKind::Radius if !(from > 0.0 && to >= from) => invalid("radius leg must be positive and nondecreasing"),
            _ => Ok(Self { kind, from, to, steps }),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.from + (self.to - self.from) * k as f64 / self.steps as f64).collect()
    }
}

/// `kind:from:to:steps`, e.g. `s:0.5:1:5`.
impl FromStr for HomotopyLeg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 4 {
            return invalid(format!("leg '{s}' is not of the form kind:from:to:steps"));
        }
        let kind = match parts[0] {
            "s" => LegKind::Nonlinearity,
            "r" => LegKind::Radius,
            "v" => LegKind::Potential,
            k => return invalid(format!("unknown leg kind '{k}'")),
        };
        let num =
            |x: &str| x.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number '{x}' in leg '{s}'")));
        let steps =
            parts[3].parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad step count in leg '{s}'")))?;
        HomotopyLeg::new(kind, num(parts[1])?, num(parts[2])?, steps)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HomotopySchedule {
    pub legs: Vec<HomotopyLeg>,
}

impl HomotopySchedule {
    pub fn new(legs: Vec<HomotopyLeg>) -> Self {
        Self { legs }
    }
}

/// One continuation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub leg: LegKind,
    pub value: f64,
    pub level: f64,
    pub lambda: f64,
    pub residual_norm: f64,
    pub converged: bool,
}

fn regrid(u: &Field, r: f64) -> Result<Field> {
    let mesh = u.mesh();
    let phys = r * mesh.scale();
    match mesh.grid() {
        Grid::Radial(g) => {
            let ng = g.resized(phys)?;
            let mut vals = u.values().to_vec();
            vals.resize(ng.len(), 0.0);
            Field::on_mesh(Mesh::new(ng, mesh.scale())?, vals)
        }
        Grid::Box(g) => {
            let n_new = (2.0 * phys / g.h()).round() as usize;
            let ng = BoxGrid::from_spacing(g.h(), n_new, g.boundary())?;
            let (n, off) = (g.n(), (n_new.saturating_sub(g.n())) / 2);
            if n_new < n {
                return invalid("box radius leg cannot shrink the domain");
            }
            let mut vals = vec![0.0; ng.len()];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        vals[ng.index(i + off, j + off, k + off)] = u.values()[g.index(i, j, k)];
                    }
                }
            }
            Field::on_mesh(Mesh::new(ng, mesh.scale())?, vals)
        }
    }
}

/// Follows a solution along the legs of `schedule`.
///
/// `seed` must solve the problem at the start of the schedule. The potential
/// amplitude starts at the `from` value of the first potential leg, or at 1
/// when there is none. A failing step stops the run and returns the last
/// iterate with `converged = false` and the trace so far.
pub fn continuation(
    schedule: &HomotopySchedule,
    params: &ProblemParams,
    v: &PotentialSpec,
    seed: &Solution,
    opts: &NewtonOptions,
) -> Result<Solution> {
    params.validate()?;
    let mut s = seed.params.s;
    let mut eps = schedule.legs.iter().find(|l| l.kind == LegKind::Potential).map_or(1.0, |l| l.from);
    let mut pp = params.with_s(s)?;
    let mut ev = Evaluator::new(&v.scaled(eps), &pp, &opts.coulomb)?;
    let mut u = seed.u.clone();
    let mut lambda = seed.lambda;
    let mut trace: Vec<TraceEntry> = seed.trace.clone();
    let mut last: Option<Solution> = None;
    for leg in &schedule.legs {
        for value in leg.values() {
            let current = match leg.kind {
                LegKind::Nonlinearity => s,
                LegKind::Potential => eps,
                LegKind::Radius => u.mesh().extent(),
            };
            // a radius is only realized up to half a spacing
            let same = match leg.kind {
                LegKind::Radius => (value - current).abs() < 0.5 * u.mesh().spacing(),
                _ => (value - current).abs() <= 1e-12 * value.abs().max(1.0),
            };
            if same && last.is_some() {
                continue;
            }
            match leg.kind {
                LegKind::Nonlinearity => {
                    s = value;
                    pp = pp.with_s(s)?;
                    ev.set_params(&pp)?;
                }
                LegKind::Potential => {
                    eps = value;
                    ev.set_potential(&v.scaled(eps))?;
                }
                LegKind::Radius => {
                    if !same {
                        u = regrid(&u, value)?;
                    }
                }
            }
            let sol = newton::refine(&mut ev, &u, lambda, opts)?;
            trace.push(TraceEntry {
                leg: leg.kind,
                value,
                level: sol.level(),
                lambda: sol.lambda,
                residual_norm: sol.residual_norm,
                converged: sol.converged,
            });
            u = sol.u.clone();
            lambda = sol.lambda;
            let failed = !sol.converged;
            last = Some(sol);
            if failed {
                let mut out = last.expect("just set");
                out.trace = trace;
                return Ok(out);
            }
        }
    }
    let mut out = match last {
        Some(sol) => sol,
        None => newton::refine(&mut ev, &u, lambda, opts)?,
    };
    out.trace = trace;
    Ok(out)
}
