//! Box-bounded maximizers: real-coded genetic algorithm and particle swarm.
//!
//! Both optimizers maximize a fitness `Fn(&[f64]) -> f64`, draw all random
//! numbers from a seeded ChaCha stream in a fixed order, and never evaluate a
//! point outside the bounds.

mod fitness;
mod ga;
mod pso;

pub use fitness::pss_fitness;
pub use ga::{ga_optimize, roulette_probabilities, GaConfig};
pub use pso::{
    clamp_velocity, inertia_weight, pso_optimize, pso_position_update, pso_velocity_update,
    PsoConfig,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PssParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = Self { lo, hi };
        b.validate()?;
        Ok(b)
    }

    /// `K_s ∈ [5, 60]`, `T1, T2 ∈ [0.1, 1]`.
    pub fn pss() -> Self {
        Self {
            lo: PssParams::LOWER.to_vec(),
            hi: PssParams::UPPER.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() {
            return Err(Error::Config(format!(
                "bounds length mismatch: {} lower vs {} upper",
                self.lo.len(),
                self.hi.len()
            )));
        }
        if self.lo.is_empty() {
            return Err(Error::Config("bounds are empty".to_string()));
        }
        for (i, (lo, hi)) in self.lo.iter().zip(&self.hi).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!("bounds[{i}]: need finite lo < hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (lo, hi))| (lo..=hi).contains(&v))
    }

    pub fn width(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| lo + rng.random::<f64>() * (hi - lo))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_x: Vec<f64>,
    pub best_fitness: f64,
    /// Best fitness after initialization and after every generation.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

/// Maps NaN to -inf so comparisons stay total.
fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::NEG_INFINITY
    } else {
        f
    }
}

fn argmax(values: &[f64]) -> usize {
    // first index wins ties
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
