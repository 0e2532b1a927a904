//! External potentials `V`, their virial fields `W = ∇V·x` and
//! `W̃ = V |x|`, integral norms and the admissibility checks.

mod assumptions;
mod quadrature;

pub use assumptions::{
    a_star, aubin_talenti_s, check_v1, check_v1prime, check_v2_sampled, check_v3, check_v4,
    embedding_constant_gaussian, eta_tilde, lambda_pq, theta_v1prime, AssumptionReport, V2Sample,
};

use crate::error::{Error, Result};
use crate::mesh::{Field, Mesh};

/// Description of an external potential.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Zero,
    /// `c (1 + |x|)^{-α}`.
    PowerDecay {
        c: f64,
        alpha: f64,
    },
    /// `c (1 + |x|)^{-α}` on the unit ball, `2^{-α} c |x|^{-β}` outside.
    PiecewisePower {
        c: f64,
        alpha: f64,
        beta: f64,
    },
    /// `(1 + ε x₃/|x|) V_base(x)`.
    AngularModulated {
        base: Box<PotentialSpec>,
        amplitude: f64,
    },
    /// `-c e^{-|x|²/σ²}`.
    GaussianWell {
        c: f64,
        sigma: f64,
    },
    /// Radial table, linear in between, zero past the last radius.
    /// `derivatives` holds `dV/dr` and is required wherever `W` is needed.
    CustomTable {
        radii: Vec<f64>,
        values: Vec<f64>,
        derivatives: Option<Vec<f64>>,
    },
    /// `factor * V_base`.
    Scaled {
        factor: f64,
        base: Box<PotentialSpec>,
    },
}

/// Known sign of a potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    Zero,
    Nonnegative,
    Nonpositive,
    Mixed,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Potential(format!("{name} must be positive, got {v}")))
    }
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Zero => Ok(()),
            PotentialSpec::PowerDecay { c, alpha } => {
                positive("c", *c)?;
                positive("alpha", *alpha)
            }
            PotentialSpec::PiecewisePower { c, alpha, beta } => {
                positive("c", *c)?;
                positive("alpha", *alpha)?;
                positive("beta", *beta)
            }
            PotentialSpec::AngularModulated { base, amplitude } => {
                if !(amplitude.is_finite() && amplitude.abs() < 1.0) {
                    return Err(Error::Potential(format!("angular amplitude must lie in (-1, 1), got {amplitude}")));
                }
                if matches!(**base, PotentialSpec::AngularModulated { .. }) {
                    return Err(Error::Potential("nested angular modulation".into()));
                }
                base.validate()
            }
            PotentialSpec::GaussianWell { c, sigma } => {
                positive("c", *c)?;
                positive("sigma", *sigma)
            }
            PotentialSpec::CustomTable { radii, values, derivatives } => {
                if radii.len() < 2 || radii.len() != values.len() {
                    return Err(Error::Potential("table needs at least two radii and one value per radius".into()));
                }
                if let Some(d) = derivatives {
                    if d.len() != radii.len() {
                        return Err(Error::Potential("derivative column has wrong length".into()));
                    }
                    if d.iter().any(|x| !x.is_finite()) {
                        return Err(Error::Potential("non-finite derivative in table".into()));
                    }
                }
                if radii[0] < 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Potential("table radii must be nonnegative and strictly increasing".into()));
                }
                if radii.iter().chain(values).any(|x| !x.is_finite()) {
                    return Err(Error::Potential("non-finite entry in table".into()));
                }
                Ok(())
            }
            PotentialSpec::Scaled { factor, base } => {
                if !factor.is_finite() {
                    return Err(Error::Potential(format!("scale factor {factor} is not finite")));
                }
                base.validate()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PotentialSpec::Zero => true,
            PotentialSpec::Scaled { factor, base } => *factor == 0.0 || base.is_zero(),
            PotentialSpec::AngularModulated { base, .. } => base.is_zero(),
            PotentialSpec::CustomTable { values, .. } => values.iter().all(|v| *v == 0.0),
            _ => false,
        }
    }

    pub fn is_radial(&self) -> bool {
        match self {
            PotentialSpec::AngularModulated { amplitude, base } => *amplitude == 0.0 && base.is_radial(),
            PotentialSpec::Scaled { base, .. } => base.is_radial(),
            _ => true,
        }
    }

    /// `ε V`.
    pub fn scaled(&self, factor: f64) -> PotentialSpec {
        if factor == 1.0 {
            return self.clone();
        }
        PotentialSpec::Scaled { factor, base: Box::new(self.clone()) }
    }

    pub fn sign_class(&self) -> SignClass {
        match self {
            PotentialSpec::Zero => SignClass::Zero,
            PotentialSpec::PowerDecay { .. } | PotentialSpec::PiecewisePower { .. } => SignClass::Nonnegative,
            PotentialSpec::GaussianWell { .. } => SignClass::Nonpositive,
            PotentialSpec::AngularModulated { base, .. } => base.sign_class(),
            PotentialSpec::CustomTable { values, .. } => {
                let pos = values.iter().any(|v| *v > 0.0);
                let neg = values.iter().any(|v| *v < 0.0);
                match (pos, neg) {
                    (false, false) => SignClass::Zero,
                    (true, false) => SignClass::Nonnegative,
                    (false, true) => SignClass::Nonpositive,
                    (true, true) => SignClass::Mixed,
                }
            }
            PotentialSpec::Scaled { factor, base } => {
                if *factor == 0.0 {
                    return SignClass::Zero;
                }
                match (base.sign_class(), *factor > 0.0) {
                    (s, true) => s,
                    (SignClass::Nonnegative, false) => SignClass::Nonpositive,
                    (SignClass::Nonpositive, false) => SignClass::Nonnegative,
                    (s, false) => s,
                }
            }
        }
    }

    /// Radial profile `V(r)`; the angular factor is not included.
    fn profile(&self, r: f64) -> f64 {
        match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::PowerDecay { c, alpha } => c * (1.0 + r).powf(-alpha),
            PotentialSpec::PiecewisePower { c, alpha, beta } => {
                if r < 1.0 {
                    c * (1.0 + r).powf(-alpha)
                } else {
                    c * 2f64.powf(-alpha) * r.powf(-beta)
                }
            }
            PotentialSpec::AngularModulated { base, .. } => base.profile(r),
            PotentialSpec::GaussianWell { c, sigma } => -c * (-(r * r) / (sigma * sigma)).exp(),
            PotentialSpec::CustomTable { radii, values, .. } => table_lookup(radii, values, r),
            PotentialSpec::Scaled { factor, base } => factor * base.profile(r),
        }
    }

    /// `r dV/dr` of the radial profile, `None` when unknown.
    fn profile_virial(&self, r: f64) -> Option<f64> {
        Some(match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::PowerDecay { c, alpha } => -alpha * c * r * (1.0 + r).powf(-alpha - 1.0),
            PotentialSpec::PiecewisePower { c, alpha, beta } => {
                if r < 1.0 {
                    -alpha * c * r * (1.0 + r).powf(-alpha - 1.0)
                } else {
                    -beta * c * 2f64.powf(-alpha) * r.powf(-beta)
                }
            }
            PotentialSpec::AngularModulated { base, .. } => base.profile_virial(r)?,
            PotentialSpec::GaussianWell { c, sigma } => {
                let s2 = sigma * sigma;
                2.0 * c * r * r / s2 * (-(r * r) / s2).exp()
            }
            PotentialSpec::CustomTable { radii, derivatives, .. } => r * table_lookup(radii, derivatives.as_ref()?, r),
            PotentialSpec::Scaled { factor, base } => factor * base.profile_virial(r)?,
        })
    }

    fn angular(&self, x: [f64; 3]) -> f64 {
        match self {
            PotentialSpec::AngularModulated { amplitude, .. } => {
                let r = norm(x);
                if r == 0.0 {
                    1.0
                } else {
                    1.0 + amplitude * x[2] / r
                }
            }
            PotentialSpec::Scaled { base, .. } => base.angular(x),
            _ => 1.0,
        }
    }

    /// `V(x)`.
    pub fn value(&self, x: [f64; 3]) -> f64 {
        self.angular(x) * self.profile(norm(x))
    }

    /// `W(x) = ∇V(x)·x`. The angular factor is 0-homogeneous and drops out.
    pub fn virial(&self, x: [f64; 3]) -> Option<f64> {
        Some(self.angular(x) * self.profile_virial(norm(x))?)
    }

    /// `∇V(x)` for `x ≠ 0`.
    pub fn gradient(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        let r = norm(x);
        if r == 0.0 {
            return Some([0.0; 3]);
        }
        let dv = self.profile_virial(r)? / r;
        let ang = self.angular(x);
        let e = [x[0] / r, x[1] / r, x[2] / r];
        let mut g = [ang * dv * e[0], ang * dv * e[1], ang * dv * e[2]];
        if let Some(eps) = self.amplitude() {
            // ∇(x₃/r) = (e₃ - e e₃·e)/r
            let v = self.profile(r);
            for (k, gk) in g.iter_mut().enumerate() {
                let e3 = if k == 2 { 1.0 } else { 0.0 };
                *gk += v * eps * (e3 - e[k] * e[2]) / r;
            }
        }
        Some(g)
    }

    fn amplitude(&self) -> Option<f64> {
        match self {
            PotentialSpec::AngularModulated { amplitude, .. } => Some(*amplitude),
            PotentialSpec::Scaled { base, .. } => base.amplitude(),
            _ => None,
        }
    }
}

fn norm(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn table_lookup(radii: &[f64], values: &[f64], r: f64) -> f64 {
    if r <= radii[0] {
        return values[0];
    }
    let last = radii.len() - 1;
    if r > radii[last] {
        return 0.0;
    }
    let k = radii.partition_point(|&x| x < r).max(1);
    let (r0, r1) = (radii[k - 1], radii[k]);
    let s = (r - r0) / (r1 - r0);
    values[k - 1] * (1.0 - s) + values[k] * s
}

/// `V`, `W = ∇V·x` and `W̃ = V |x|` sampled on a mesh.
#[derive(Debug, Clone)]
pub struct PotentialFields {
    pub v: Field,
    pub w: Field,
    pub w_tilde: Field,
}

/// Samples a potential at the physical nodes of `mesh`.
pub fn materialize(spec: &PotentialSpec, mesh: &Mesh) -> Result<PotentialFields> {
    spec.validate()?;
    if mesh.grid().is_radial() && !spec.is_radial() {
        return Err(Error::Potential("non-radial potential on a radial grid".into()));
    }
    let n = mesh.len();
    let mut v = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut wt = Vec::with_capacity(n);
    let mut missing = false;
    for i in 0..n {
        let x = mesh.point(i);
        let val = spec.value(x);
        v.push(val);
        wt.push(val * norm(x));
        match spec.virial(x) {
            Some(q) => w.push(q),
            None => {
                missing = true;
                w.push(0.0);
            }
        }
    }
    if missing && !spec.is_zero() {
        return Err(Error::Potential(
            "table potential without derivative data: gradient required for the virial term".into(),
        ));
    }
    Ok(PotentialFields {
        v: Field::on_mesh(*mesh, v)?,
        w: Field::on_mesh(*mesh, w)?,
        w_tilde: Field::on_mesh(*mesh, wt)?,
    })
}

/// Integral norms of `V`, `W` and `W̃` over all of ℝ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialNorms {
    pub q: f64,
    pub v_inf: f64,
    pub v_q: f64,
    pub v_three_halves: f64,
    pub w_inf: f64,
    pub w_q: f64,
    pub w_tilde_three: f64,
}

impl PotentialNorms {
    pub fn zero(q: f64) -> Self {
        Self { q, v_inf: 0.0, v_q: 0.0, v_three_halves: 0.0, w_inf: 0.0, w_q: 0.0, w_tilde_three: 0.0 }
    }
}

/// Norms by radial quadrature with a closed-form tail for algebraic decay.
///
/// `q` is the exponent of the `L^q` norms of `V` and `W`.
pub fn potential_norms(spec: &PotentialSpec, q: f64) -> Result<PotentialNorms> {
    spec.validate()?;
    if !(q.is_finite() && q >= 1.5) {
        return Err(Error::InvalidArgument(format!("norm exponent q must be >= 3/2, got {q}")));
    }
    if spec.is_zero() {
        return Ok(PotentialNorms::zero(q));
    }
    let eps = spec.amplitude().unwrap_or(0.0);
    let v = |r: f64| spec.profile(r);
    let w = |r: f64| spec.profile_virial(r);
    if w(1.0).is_none() {
        return Err(Error::Potential(
            "table potential without derivative data: gradient required for the virial term".into(),
        ));
    }
    let w = |r: f64| spec.profile_virial(r).unwrap_or(0.0);
    let tail = spec.tail_exponent();
    let breaks = spec.breakpoints();
    let lq = |f: &dyn Fn(f64) -> f64, e: f64, decay: Option<f64>| -> f64 {
        let ang = angular_power_mean(eps, e);
        let int = quadrature::radial_power_integral(f, e, decay, &breaks);
        (ang * int).powf(1.0 / e)
    };
    let sup = |f: &dyn Fn(f64) -> f64| (1.0 + eps.abs()) * quadrature::radial_sup(f, &breaks);
    let wt = |r: f64| v(r) * r;
    Ok(PotentialNorms {
        q,
        v_inf: sup(&v),
        v_q: lq(&v, q, tail),
        v_three_halves: lq(&v, 1.5, tail),
        w_inf: sup(&w),
        w_q: lq(&w, q, tail),
        w_tilde_three: lq(&wt, 3.0, tail.map(|t| t - 1.0)),
    })
}

impl PotentialSpec {
    /// `m` such that `|V(r)| ~ r^{-m}` at infinity; `None` for fast decay.
    fn tail_exponent(&self) -> Option<f64> {
        match self {
            PotentialSpec::PowerDecay { alpha, .. } => Some(*alpha),
            PotentialSpec::PiecewisePower { beta, .. } => Some(*beta),
            PotentialSpec::AngularModulated { base, .. } | PotentialSpec::Scaled { base, .. } => base.tail_exponent(),
            _ => None,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            PotentialSpec::PiecewisePower { .. } => vec![1.0],
            PotentialSpec::GaussianWell { sigma, .. } => vec![*sigma, 3.0 * sigma, 8.0 * sigma],
            PotentialSpec::CustomTable { radii, .. } => radii.clone(),
            PotentialSpec::AngularModulated { base, .. } | PotentialSpec::Scaled { base, .. } => base.breakpoints(),
            _ => vec![],
        }
    }
}

/// `(1/4π) ∫_{S²} |1 + ε cos θ|^e dω`.
fn angular_power_mean(eps: f64, e: f64) -> f64 {
    if eps == 0.0 {
        return 1.0;
    }
    ((1.0 + eps).powf(e + 1.0) - (1.0 - eps).powf(e + 1.0)) / (2.0 * eps * (e + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolates_and_vanishes_outside() {
        let t =
            PotentialSpec::CustomTable { radii: vec![0.0, 1.0, 2.0], values: vec![2.0, 1.0, 0.5], derivatives: None };
        t.validate().unwrap();
        assert_eq!(t.value([0.5, 0.0, 0.0]), 1.5);
        assert_eq!(t.value([3.0, 0.0, 0.0]), 0.0);
        assert!(t.virial([1.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn angular_mean_is_exact_for_squares() {
        // mean of (1 + ε cosθ)² is 1 + ε²/3
        let e = 0.4;
        assert!((angular_power_mean(e, 2.0) - (1.0 + e * e / 3.0)).abs() < 1e-14);
    }
}
