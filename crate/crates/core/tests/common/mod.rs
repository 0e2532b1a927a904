#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sps_core::{Field, RadialGrid};

/// Normalized Gaussian `a (πσ²)^{-3/4} e^{-r²/2σ²}` and its closed forms.
pub struct Gaussian {
    pub a: f64,
    pub sigma: f64,
}

impl Gaussian {
    pub fn value(&self, r: f64) -> f64 {
        self.a * (PI * self.sigma * self.sigma).powf(-0.75) * (-r * r / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn field(&self, g: &RadialGrid) -> Field {
        Field::from_radial_fn(g, |r| self.value(r)).unwrap()
    }

    pub fn grad_sq(&self) -> f64 {
        1.5 * self.a * self.a / (self.sigma * self.sigma)
    }

    pub fn hartree(&self) -> f64 {
        self.a.powi(4) * (2.0 / PI).sqrt() / self.sigma
    }

    pub fn phi(&self, r: f64) -> f64 {
        let a2 = self.a * self.a;
        if r == 0.0 {
            2.0 * a2 / (self.sigma * PI.sqrt())
        } else {
            a2 * statrs::function::erf::erf(r / self.sigma) / r
        }
    }

    /// `‖u‖_p^p`.
    pub fn lp_pow(&self, p: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        self.a.powf(p) * (PI * s2).powf(-0.75 * p) * (2.0 * PI * s2 / p).powf(1.5)
    }
}

/// Random smooth radial field: a positive sum of a few Gaussian bumps.
pub fn random_smooth(g: &RadialGrid, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..4);
    let bumps: Vec<(f64, f64, f64)> =
        (0..k).map(|_| (rng.gen_range(0.2..1.5), rng.gen_range(0.0..2.0), rng.gen_range(0.5..1.5))).collect();
    Field::from_radial_fn(g, |r| {
        bumps.iter().map(|(amp, c, w)| amp * (-(r - c) * (r - c) / (w * w)).exp()).sum::<f64>()
    })
    .unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
