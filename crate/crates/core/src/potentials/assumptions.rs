//! Admissibility checks for external potentials and the constants they use.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

use super::{PotentialNorms, PotentialSpec};
use crate::error::{invalid, Result};

/// Outcome of one admissibility check. `margin > 0` iff the check passes.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub name: &'static str,
    pub verdict: bool,
    pub margin: f64,
    pub details: Vec<(String, f64)>,
}

impl AssumptionReport {
    fn new(name: &'static str, terms: Vec<(String, f64)>) -> Self {
        let margin = terms.iter().map(|(_, m)| *m).fold(f64::INFINITY, f64::min);
        Self { name, verdict: margin > 0.0, margin, details: terms }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 10.0 / 3.0 && p < 6.0 {
        Ok(())
    } else {
        invalid(format!("p must lie in the open interval (10/3, 6), got {p}"))
    }
}

/// Sharp Sobolev constant `S = 3π (Γ(3/2)/Γ(3))^{2/3}`.
pub fn aubin_talenti_s() -> f64 {
    3.0 * std::f64::consts::PI * (gamma(1.5) / gamma(3.0)).powf(2.0 / 3.0)
}

/// `η̃ = 6(p-2) / (3p - 10 - 3(p-4)⁺ S⁻¹ ‖V‖_{3/2} - 4 S^{-1/2} ‖W̃‖₃)`.
pub fn eta_tilde(p: f64, norms: &PotentialNorms) -> Result<f64> {
    check_p(p)?;
    let s = aubin_talenti_s();
    let den =
        3.0 * p - 10.0 - 3.0 * (p - 4.0).max(0.0) / s * norms.v_three_halves - 4.0 / s.sqrt() * norms.w_tilde_three;
    if den <= 0.0 {
        return invalid(format!("denominator of eta_tilde is not positive ({den})"));
    }
    Ok(6.0 * (p - 2.0) / den)
}

/// `ϑ(t)` from the bounded-potential condition with embedding constant `C_q`.
pub fn theta_v1prime(t: f64, p: f64, q: f64, c_q: f64) -> Result<f64> {
    check_p(p)?;
    if !(t >= 0.0 && q >= 1.5 && c_q > 0.0) {
        return invalid("theta needs t >= 0, q >= 3/2 and C_q > 0");
    }
    let c2 = c_q * c_q;
    let k = (3.0 * p - 8.0) / p;
    let first = (1.0 + p * c2 / (q * (p - 2.0)) * k.max(1.0) * t).powf(3.0 * (p - 2.0) / (3.0 * p - 10.0));
    let second = 1.0 + t * (1.0 - 1.5 / q) * 3.0 * c2 * (p - 2.0) / (3.0 * p - 10.0);
    Ok(first * second - 1.0)
}

/// `Λ_{p,q} = C_q^{-2} min{p/(3p-8), 1}`.
pub fn lambda_pq(p: f64, _q: f64, c_q: f64) -> Result<f64> {
    check_p(p)?;
    if !(c_q > 0.0) {
        return invalid("C_q must be positive");
    }
    Ok((p / (3.0 * p - 8.0)).min(1.0) / (c_q * c_q))
}

/// `a_* = ((6-p)/(|6-2p| Ĉ))^{1/3} (δ/η̃)^{1/6}`.
pub fn a_star(p: f64, c_hat: f64, delta: f64, eta_t: f64) -> Result<f64> {
    check_p(p)?;
    if !(c_hat > 0.0 && delta > 0.0 && eta_t > 0.0) {
        return invalid("a_star needs positive C_hat, delta and eta_tilde");
    }
    Ok(((6.0 - p) / ((6.0 - 2.0 * p).abs() * c_hat)).powf(1.0 / 3.0) * (delta / eta_t).powf(1.0 / 6.0))
}

/// Lower bound for the embedding constant of `H¹ ⊂ L^{2q/(q-1)}`,
/// from the best Gaussian `e^{-|x|²/2σ²}`.
pub fn embedding_constant_gaussian(q: f64) -> Result<f64> {
    if !(q >= 1.5) {
        return invalid(format!("q must be >= 3/2, got {q}"));
    }
    let pi = std::f64::consts::PI;
    let r = if q.is_infinite() { 2.0 } else { 2.0 * q / (q - 1.0) };
    let ratio = |ls: f64| {
        let s2 = (2.0 * ls).exp();
        let lr = (2.0 * pi * s2 / r).powf(1.5 / r);
        let h1 = ((pi * s2).powf(1.5) * (1.0 + 1.5 / s2)).sqrt();
        lr / h1
    };
    let (mut lo, mut hi) = (-10.0f64, 10.0f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if ratio(a) > ratio(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    Ok(ratio(0.5 * (lo + hi)))
}

/// Bounded nonnegative potentials below the mountain-pass level:
/// `‖V‖∞ < 2θ c_a/a²`, `‖W‖∞ < η c_a/a²` and `η + 2θ < (6-p)/(p-2)`.
pub fn check_v1(norms: &PotentialNorms, a: f64, c_a: f64, theta: f64, eta: f64, p: f64) -> Result<AssumptionReport> {
    check_p(p)?;
    if !(theta > 0.0 && theta < 1.0) {
        return invalid(format!("theta must lie in (0, 1), got {theta}"));
    }
    if !(eta > 0.0 && a > 0.0 && c_a > 0.0) {
        return invalid("eta, a and c_a must be positive");
    }
    let a2 = a * a;
    Ok(AssumptionReport::new(
        "V1",
        vec![
            ("2 theta c_a / a^2 - |V|_inf".into(), 2.0 * theta * c_a / a2 - norms.v_inf),
            ("eta c_a / a^2 - |W|_inf".into(), eta * c_a / a2 - norms.w_inf),
            ("(6-p)/(p-2) - eta - 2 theta".into(), (6.0 - p) / (p - 2.0) - eta - 2.0 * theta),
        ],
    ))
}

/// Integrable potentials: `3p - 10 - 4 C_q² ‖W‖_q > 0` and the smallness of
/// `(‖V‖_q + ‖W‖_q)` against `6 - p`.
pub fn check_v1prime(norms: &PotentialNorms, p: f64, q: f64, c_q: f64) -> Result<AssumptionReport> {
    check_p(p)?;
    let c2 = c_q * c_q;
    let den = 3.0 * p - 10.0 - 4.0 * c2 * norms.w_q;
    let theta = theta_v1prime(norms.v_q, p, q, c_q)?;
    let lhs = (p - 2.0) * (norms.v_q + norms.w_q) * c2 * 6.0 * (p - 2.0) * (1.0 + theta) / den;
    let second = if den > 0.0 { (6.0 - p) - lhs } else { f64::NEG_INFINITY };
    Ok(AssumptionReport::new(
        "V1'",
        vec![("3p - 10 - 4 C_q^2 |W|_q".into(), den), ("(6-p) - kappa lhs".into(), second)],
    ))
}

/// Nonpositive potentials with small `L^{3/2}` and weighted `L³` norms.
pub fn check_v4(norms: &PotentialNorms, p: f64) -> Result<AssumptionReport> {
    check_p(p)?;
    let s = aubin_talenti_s();
    let k = 2.0 * (p - 2.0) * (p - 2.0) / (6.0 - p);
    let lhs = 3.0 * (k + (p - 4.0).max(0.0)) / s * norms.v_three_halves
        + 4.0 * (1.5 * k + 1.0) / s.sqrt() * norms.w_tilde_three;
    Ok(AssumptionReport::new(
        "V4",
        vec![
            ("S/2 - |V|_{3/2}".into(), 0.5 * s - norms.v_three_halves),
            ("3p - 10 - lhs".into(), 3.0 * p - 10.0 - lhs),
        ],
    ))
}

/// `V <= 0`, `V ≢ 0` and `V → 0` at infinity, checked on samples.
pub fn check_v3(spec: &PotentialSpec) -> Result<AssumptionReport> {
    spec.validate()?;
    let mut max_v = f64::NEG_INFINITY;
    let mut max_abs: f64 = 0.0;
    let dirs = fibonacci_sphere(64);
    let mut r = 0.0;
    while r < 1e4 {
        for d in &dirs {
            let v = spec.value([r * d[0], r * d[1], r * d[2]]);
            max_v = max_v.max(v);
            max_abs = max_abs.max(v.abs());
        }
        r = if r == 0.0 { 1e-3 } else { r * 1.05 };
    }
    let far = dirs.iter().map(|d| spec.value([1e4 * d[0], 1e4 * d[1], 1e4 * d[2]]).abs()).fold(0.0, f64::max);
    Ok(AssumptionReport::new(
        "V3",
        vec![
            ("sign (positive iff V <= 0)".into(), if max_v <= 0.0 { max_abs } else { -max_v }),
            ("|V|_inf (nonzero)".into(), max_abs),
            ("decay 1e-3 |V|_inf - |V(far)|".into(), 1e-3 * max_abs - far),
        ],
    ))
}

/// Sampled maxima of `|y|^α ∇V(x)·y` over `x ∈ B_{δ|y|}(y)` per radius.
#[derive(Debug, Clone, PartialEq)]
pub struct V2Sample {
    pub radii: Vec<f64>,
    pub maxima: Vec<f64>,
    /// All maxima negative and nonincreasing over the two largest radii.
    pub consistent: bool,
}

pub fn check_v2_sampled(spec: &PotentialSpec, radii: &[f64], alpha: f64, delta: f64, seed: u64) -> Result<V2Sample> {
    spec.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("delta must lie in (0, 1), got {delta}"));
    }
    if radii.len() < 2 || radii.iter().any(|r| !(*r > 0.0)) {
        return invalid("need at least two positive radii");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs = fibonacci_sphere(32);
    let mut maxima = Vec::with_capacity(radii.len());
    for &ry in radii {
        let mut best = f64::NEG_INFINITY;
        for d in &dirs {
            let y = [ry * d[0], ry * d[1], ry * d[2]];
            for _ in 0..16 {
                let off = random_unit(&mut rng);
                let rho = delta * ry * rng.gen::<f64>().cbrt();
                let x = [y[0] + rho * off[0], y[1] + rho * off[1], y[2] + rho * off[2]];
                let g = spec
                    .gradient(x)
                    .ok_or_else(|| crate::Error::Potential("gradient required for the V2 check".into()))?;
                let val = ry.powf(alpha) * (g[0] * y[0] + g[1] * y[1] + g[2] * y[2]);
                best = best.max(val);
            }
        }
        maxima.push(best);
    }
    let k = maxima.len();
    let consistent = maxima.iter().all(|m| *m < 0.0) && maxima[k - 1] <= maxima[k - 2];
    Ok(V2Sample { radii: radii.to_vec(), maxima, consistent })
}

fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let ga = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let th = ga * i as f64;
            [r * th.cos(), r * th.sin(), z]
        })
        .collect()
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    [r * th.cos(), r * th.sin(), z]
}
