use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, sanitize, Bounds, OptimizationResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub pop_size: usize,
    pub generations: usize,
    /// Fraction of the population replaced by offspring each generation.
    pub generation_gap: f64,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            pop_size: 20,
            generations: 10,
            generation_gap: 0.9,
            p_crossover: 0.95,
            p_mutation: 0.10,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::Config("ga: pop_size must be >= 2".to_string()));
        }
        if !(self.generation_gap > 0.0 && self.generation_gap <= 1.0) {
            return Err(Error::Config("ga: generation_gap must be in (0, 1]".to_string()));
        }
        for (name, p) in [("p_crossover", self.p_crossover), ("p_mutation", self.p_mutation)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("ga: {name} must be in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Individuals carried over unchanged; never fewer than one.
    pub fn elite_count(&self) -> usize {
        let e = ((1.0 - self.generation_gap) * self.pop_size as f64).round() as usize;
        e.clamp(1, self.pop_size)
    }
}

/// Roulette selection probabilities.
///
/// A population containing negative fitness is shifted up by its minimum so
/// the worst individual gets zero mass; non-negative fitness is used as is.
/// Non-finite fitness gets zero mass. If no mass remains every individual is
/// equally likely.
pub fn roulette_probabilities(fitness: &[f64]) -> Vec<f64> {
    let n = fitness.len();
    if n == 0 {
        return Vec::new();
    }
    let f_min = fitness
        .iter()
        .copied()
        .filter(|f| f.is_finite())
        .fold(f64::INFINITY, f64::min);
    let shift = f_min.min(0.0);
    let mass: Vec<f64> = fitness
        .iter()
        .map(|f| if f.is_finite() { f - shift } else { 0.0 })
        .collect();
    let total: f64 = mass.iter().sum();
    if total > 0.0 && total.is_finite() {
        mass.into_iter().map(|m| m / total).collect()
    } else {
        vec![1.0 / n as f64; n]
    }
}

fn spin<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            return i;
        }
    }
    // rounding left r above the final cumulative sum
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

/// Real-coded GA: roulette selection, blend crossover, uniform-reset mutation,
/// and elitism sized by the generation gap.
pub fn ga_optimize<F>(fitness: F, bounds: &Bounds, cfg: &GaConfig) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64,
{
    bounds.validate()?;
    cfg.validate()?;
    let dim = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        sanitize(fitness(x))
    };

    let mut pop: Vec<Vec<f64>> = (0..cfg.pop_size).map(|_| bounds.sample(&mut rng)).collect();
    let mut fit: Vec<f64> = pop.iter().map(|x| eval(x)).collect();
    let mut history = vec![fit[argmax(&fit)]];

    let elites = cfg.elite_count();
    let n_offspring = cfg.pop_size - elites;
    for _ in 0..cfg.generations {
        let probs = roulette_probabilities(&fit);
        let mut order: Vec<usize> = (0..cfg.pop_size).collect();
        // stable sort keeps the earlier individual first on ties
        order.sort_by(|&i, &j| fit[j].total_cmp(&fit[i]));

        let mut children: Vec<Vec<f64>> = Vec::with_capacity(n_offspring);
        while children.len() < n_offspring {
            let a = &pop[spin(&probs, &mut rng)];
            let b = &pop[spin(&probs, &mut rng)];
            let (mut c1, mut c2) = (a.clone(), b.clone());
            if rng.random::<f64>() < cfg.p_crossover {
                let alpha: f64 = rng.random();
                for i in 0..dim {
                    c1[i] = alpha * a[i] + (1.0 - alpha) * b[i];
                    c2[i] = (1.0 - alpha) * a[i] + alpha * b[i];
                }
            }
            for child in [&mut c1, &mut c2] {
                for (i, gene) in child.iter_mut().enumerate() {
                    if rng.random::<f64>() < cfg.p_mutation {
                        *gene = bounds.lo[i] + rng.random::<f64>() * bounds.width(i);
                    }
                    // blends of in-bounds parents stay in bounds up to rounding
                    *gene = gene.clamp(bounds.lo[i], bounds.hi[i]);
                }
            }
            children.push(c1);
            if children.len() < n_offspring {
                children.push(c2);
            }
        }

        let mut next_pop = Vec::with_capacity(cfg.pop_size);
        let mut next_fit = Vec::with_capacity(cfg.pop_size);
        for &i in order.iter().take(elites) {
            next_pop.push(pop[i].clone());
            next_fit.push(fit[i]);
        }
        for child in children {
            next_fit.push(eval(&child));
            next_pop.push(child);
        }
        pop = next_pop;
        fit = next_fit;
        history.push(fit[argmax(&fit)]);
    }

    let best = argmax(&fit);
    Ok(OptimizationResult {
        best_x: pop[best].clone(),
        best_fitness: fit[best],
        history,
        evaluations,
    })
}
