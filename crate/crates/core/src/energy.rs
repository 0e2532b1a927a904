//! Energy functional, Pohozaev functional and the fiber map `t ↦ u^t`.
//!
//! With `A = ‖∇u‖²`, `B = ∫φ_u u²`, `C = ∫V u²`, `D = ∫(∇V·x) u²` and
//! `E = ‖u‖_p^p`:
//!
//! ```text
//! J_V(u) = A/2 + C/2 + B/4 - s E/p
//! P_V(u) = A + B/4 - 3(p-2)s/(2p) E - D/2
//! ```

use crate::coulomb::{CoulombSolver, CoulombSolverConfig};
use crate::error::{invalid, Error, Result};
use crate::mesh::{self, Field, Grid, Mesh};
use crate::potentials::{materialize, PotentialFields, PotentialSpec};

/// Exponent `p`, mass `a` and the homotopy strength `s` of the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub p: f64,
    pub a: f64,
    pub s: f64,
}

impl ProblemParams {
    pub fn new(p: f64, a: f64) -> Result<Self> {
        let out = Self { p, a, s: 1.0 };
        out.validate()?;
        Ok(out)
    }

    pub fn with_s(mut self, s: f64) -> Result<Self> {
        self.s = s;
        self.validate()?;
        Ok(self)
    }

    pub fn with_a(mut self, a: f64) -> Result<Self> {
        self.a = a;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 10.0 / 3.0 && self.p < 6.0) {
            return invalid(format!("p must lie in the open interval (10/3, 6), got {}", self.p));
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return invalid(format!("mass a must be positive, got {}", self.a));
        }
        if !(self.s.is_finite() && (0.5..=1.0).contains(&self.s)) {
            return invalid(format!("s must lie in [1/2, 1], got {}", self.s));
        }
        Ok(())
    }

    /// `3(p-2)/2`, the dilation exponent of `E`.
    pub fn gamma_p(&self) -> f64 {
        1.5 * (self.p - 2.0)
    }
}

/// The integrals entering the functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// `A = ‖∇u‖²`.
    pub grad_sq: f64,
    /// `B = ∫ φ_u u²`.
    pub hartree: f64,
    /// `C = ∫ V u²`.
    pub potential: f64,
    /// `D = ∫ (∇V·x) u²`.
    pub virial: f64,
    /// `E = ‖u‖_p^p`.
    pub nonlinear: f64,
    /// `‖u‖₂²`.
    pub mass: f64,
}

impl EnergyBreakdown {
    pub fn energy(&self, pp: &ProblemParams) -> f64 {
        0.5 * self.grad_sq + 0.5 * self.potential + 0.25 * self.hartree - pp.s * self.nonlinear / pp.p
    }

    pub fn pohozaev(&self, pp: &ProblemParams) -> f64 {
        self.grad_sq + 0.25 * self.hartree - pp.gamma_p() * pp.s / pp.p * self.nonlinear - 0.5 * self.virial
    }

    /// `λ = (sE - A - C - B) / ‖u‖₂²`.
    pub fn lagrange_multiplier(&self, pp: &ProblemParams) -> f64 {
        (pp.s * self.nonlinear - self.grad_sq - self.potential - self.hartree) / self.mass
    }
}

/// Evaluates energies for one potential and parameter set, caching the
/// sampled potential per mesh and the Coulomb plans.
pub struct Evaluator {
    spec: PotentialSpec,
    params: ProblemParams,
    coulomb: CoulombSolver,
    fields: Option<(Mesh, PotentialFields)>,
}

impl Evaluator {
    pub fn new(spec: &PotentialSpec, params: &ProblemParams, cfg: &CoulombSolverConfig) -> Result<Self> {
        params.validate()?;
        spec.validate()?;
        Ok(Self { spec: spec.clone(), params: *params, coulomb: CoulombSolver::new(*cfg)?, fields: None })
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn set_params(&mut self, params: &ProblemParams) -> Result<()> {
        params.validate()?;
        self.params = *params;
        Ok(())
    }

    pub fn set_potential(&mut self, spec: &PotentialSpec) -> Result<()> {
        spec.validate()?;
        self.spec = spec.clone();
        self.fields = None;
        Ok(())
    }

    pub fn coulomb(&mut self) -> &mut CoulombSolver {
        &mut self.coulomb
    }

    pub fn fields(&mut self, mesh: &Mesh) -> Result<&PotentialFields> {
        let stale = match &self.fields {
            Some((m, _)) => m != mesh,
            None => true,
        };
        if stale {
            let f = materialize(&self.spec, mesh)?;
            self.fields = Some((*mesh, f));
        }
        Ok(&self.fields.as_ref().expect("just filled").1)
    }

    pub fn phi(&mut self, u: &Field) -> Result<Vec<f64>> {
        let d: Vec<f64> = u.values().iter().map(|v| v * v).collect();
        self.coulomb.potential(u.mesh(), &d)
    }

    pub fn breakdown(&mut self, u: &Field) -> Result<EnergyBreakdown> {
        let phi = self.phi(u)?;
        self.breakdown_with_phi(u, &phi)
    }

    pub(crate) fn breakdown_with_phi(&mut self, u: &Field, phi: &[f64]) -> Result<EnergyBreakdown> {
        let p = self.params.p;
        let mesh = *u.mesh();
        let vals = u.values();
        let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
        let (c, d) = if self.spec.is_zero() {
            (0.0, 0.0)
        } else {
            let f = self.fields(&mesh)?;
            (mesh.dot(f.v.values(), &sq), mesh.dot(f.w.values(), &sq))
        };
        Ok(EnergyBreakdown {
            grad_sq: mesh::grad_sq_values(&mesh, vals),
            hartree: mesh.dot(phi, &sq),
            potential: c,
            virial: d,
            nonlinear: mesh::power_integral(&mesh, vals, p),
            mass: mesh.dot(vals, vals),
        })
    }

    /// `G(u) = -Δu + V u + φ_u u - s|u|^{p-2} u` together with `φ_u`.
    pub fn first_variation(&mut self, u: &Field) -> Result<(Vec<f64>, Vec<f64>)> {
        let phi = self.phi(u)?;
        let mesh = *u.mesh();
        let vals = u.values();
        let mut g = vec![0.0; vals.len()];
        mesh::laplacian_into(&mesh, vals, &mut g);
        let (p, s) = (self.params.p, self.params.s);
        let zero = self.spec.is_zero();
        let v = if zero { None } else { Some(self.fields(&mesh)?.v.values().to_vec()) };
        for i in 0..vals.len() {
            let x = vals[i];
            let vi = v.as_ref().map_or(0.0, |v| v[i]);
            g[i] = -g[i] + (vi + phi[i]) * x - s * x.abs().powf(p - 2.0) * x;
        }
        Ok((g, phi))
    }
}

/// All energy integrals of `u` for the potential `v`.
pub fn energy_breakdown(u: &Field, v: &PotentialSpec, pp: &ProblemParams) -> Result<EnergyBreakdown> {
    Evaluator::new(v, pp, &CoulombSolverConfig::default())?.breakdown(u)
}

pub fn j_v(u: &Field, v: &PotentialSpec, pp: &ProblemParams) -> Result<f64> {
    Ok(energy_breakdown(u, v, pp)?.energy(pp))
}

pub fn pohozaev(u: &Field, v: &PotentialSpec, pp: &ProblemParams) -> Result<f64> {
    Ok(energy_breakdown(u, v, pp)?.pohozaev(pp))
}

pub fn lagrange_multiplier(u: &Field, v: &PotentialSpec, pp: &ProblemParams) -> Result<f64> {
    Ok(energy_breakdown(u, v, pp)?.lagrange_multiplier(pp))
}

/// `L²` gradient of `J_V` at `u`.
pub fn first_variation(u: &Field, v: &PotentialSpec, pp: &ProblemParams) -> Result<Field> {
    let (g, _) = Evaluator::new(v, pp, &CoulombSolverConfig::default())?.first_variation(u)?;
    u.with_values(g)
}

/// Pohozaev functional with the potential term left un-integrated:
/// `A + B/4 - 3(p-2)s/(2p) E + ½ ∫ V (3u² + 2u ∇u·x)`.
///
/// It agrees with [`pohozaev`] up to the discrete integration-by-parts defect.
pub fn pohozaev_alt(u: &Field, v: &PotentialSpec, pp: &ProblemParams) -> Result<f64> {
    let mut ev = Evaluator::new(v, pp, &CoulombSolverConfig::default())?;
    let b = ev.breakdown(u)?;
    let vv = if v.is_zero() { vec![0.0; u.len()] } else { ev.fields(u.mesh())?.v.values().to_vec() };
    let t = potential_dilation_term(u, &vv);
    Ok(b.grad_sq + 0.25 * b.hartree - pp.gamma_p() * pp.s / pp.p * b.nonlinear + 0.5 * t)
}

/// `∫ V (3u² + 2u ∇u·x)` with central differences.
fn potential_dilation_term(u: &Field, v: &[f64]) -> f64 {
    let mesh = u.mesh();
    let vals = u.values();
    let h = mesh.spacing();
    match mesh.grid() {
        Grid::Radial(_) => {
            // 4π ∫ V (ρ + r ρ') dr with ρ = (r u)²
            let m = vals.len();
            let rho: Vec<f64> = (0..m).map(|i| ((i + 1) as f64 * h * vals[i]).powi(2)).collect();
            let at = |i: isize| if i < 0 || i as usize >= m { 0.0 } else { rho[i as usize] };
            let mut acc = 0.0;
            for i in 0..m {
                let r = (i + 1) as f64 * h;
                let ii = i as isize;
                acc += v[i] * (rho[i] + r * (at(ii + 1) - at(ii - 1)) / (2.0 * h));
            }
            4.0 * std::f64::consts::PI * h * acc
        }
        Grid::Box(g) => {
            let n = g.n();
            let strides = [n * n, n, 1];
            let mut acc = 0.0;
            for idx in 0..vals.len() {
                let x = mesh.point(idx);
                let coords = [idx / (n * n), (idx / n) % n, idx % n];
                let c0 = vals[idx];
                let mut dot = 0.0;
                for axis in 0..3 {
                    let s = strides[axis];
                    let up = if coords[axis] + 1 < n { vals[idx + s] } else { -c0 };
                    let dn = if coords[axis] > 0 { vals[idx - s] } else { -c0 };
                    dot += x[axis] * (up - dn) / (2.0 * h);
                }
                acc += v[idx] * (3.0 * c0 * c0 + 2.0 * c0 * dot);
            }
            acc * h * h * h
        }
    }
}

/// `J_V(u^t)` evaluated without building `u^t`:
/// `t²A/2 + ½∫V(x/t)u² + tB/4 - s t^{3(p-2)/2} E/p`.
pub fn fiber_profile(u: &Field, v: &PotentialSpec, pp: &ProblemParams, t: f64) -> Result<f64> {
    let b = energy_breakdown(u, &PotentialSpec::Zero, pp)?;
    fiber_profile_from(&b, u, v, pp, t)
}

pub(crate) fn fiber_profile_from(
    b: &EnergyBreakdown,
    u: &Field,
    v: &PotentialSpec,
    pp: &ProblemParams,
    t: f64,
) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return invalid(format!("fiber parameter must be positive, got {t}"));
    }
    let c = if v.is_zero() {
        0.0
    } else {
        let mesh = u.mesh();
        let mut acc = 0.0;
        for (i, x) in u.values().iter().enumerate() {
            let p = mesh.point(i);
            acc += mesh.weight(i) * x * x * v.value([p[0] / t, p[1] / t, p[2] / t]);
        }
        acc
    };
    Ok(0.5 * t * t * b.grad_sq + 0.5 * c + 0.25 * t * b.hartree - pp.s * t.powf(pp.gamma_p()) * b.nonlinear / pp.p)
}

/// Unique `t* > 0` with `d/dt J_0(u^t) = 0`:
/// `t A + B/4 - 3(p-2)s/(2p) t^{(3p-8)/2} E = 0`.
pub fn fiber_stationary(u: &Field, pp: &ProblemParams) -> Result<f64> {
    let b = energy_breakdown(u, &PotentialSpec::Zero, pp)?;
    b.fiber_stationary(pp)
}

impl EnergyBreakdown {
    /// Stationary point of `t ↦ t²A/2 + tB/4 - s t^{3(p-2)/2} E/p`.
    pub fn fiber_stationary(&self, pp: &ProblemParams) -> Result<f64> {
        let b = self;
        let (a, bb, e) = (b.grad_sq, b.hartree, b.nonlinear);
        if !(e > 0.0) || !(a > 0.0) {
            return Err(Error::InvalidArgument("fiber map needs a nonzero field".into()));
        }
        let k = pp.gamma_p() * pp.s / pp.p;
        let ex = pp.gamma_p() - 1.0;
        // f(t) = A + B/(4t) - k t^{ex - 1} E is strictly decreasing
        let f = |t: f64| a + bb / (4.0 * t) - k * t.powf(ex - 1.0) * e;
        let (mut lo, mut hi) = (1e-3, 1e3);
        let mut expansions = 0;
        while f(lo) <= 0.0 {
            lo *= 0.5;
            expansions += 1;
            if expansions > 60 {
                return Err(Error::Solver("fiber stationary point not bracketed".into()));
            }
        }
        while f(hi) >= 0.0 {
            hi *= 2.0;
            expansions += 1;
            if expansions > 60 {
                return Err(Error::Solver("fiber stationary point not bracketed".into()));
            }
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-15 {
                break;
            }
        }
        Ok((lo * hi).sqrt())
    }
}

/// `‖u‖_p^p / (‖∇u‖^{3(p-2)/2} ‖u‖₂^{(6-p)/2})`, invariant under dilation.
pub fn gn_quotient(u: &Field, p: f64) -> Result<f64> {
    if !(p > 2.0 && p < 6.0) {
        return invalid(format!("p must lie in (2, 6), got {p}"));
    }
    let a = mesh::grad_sq(u);
    if a == 0.0 {
        return invalid("zero field");
    }
    let e = mesh::lp_norm(u, p)?.powf(p);
    Ok(e / (a.powf(0.75 * (p - 2.0)) * u.mass().powf(0.25 * (6.0 - p))))
}

/// `B(u) / ‖u‖_{12/5}⁴`, invariant under dilation.
pub fn hls_quotient(u: &Field) -> Result<f64> {
    let n = mesh::lp_norm(u, 2.4)?;
    if n == 0.0 {
        return invalid("zero field");
    }
    Ok(crate::coulomb::hartree_b(u, &CoulombSolverConfig::default())? / n.powi(4))
}
