use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, sanitize, Bounds, OptimizationResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub generations: usize,
    pub w_max: f64,
    pub w_min: f64,
    pub c1: f64,
    pub c2: f64,
    pub seed: u64,
    /// Velocity limit per dimension as a fraction of the bound width.
    pub v_max_fraction: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            generations: 10,
            w_max: 1.0,
            w_min: 0.5,
            c1: 1.0,
            c2: 1.0,
            seed: 0,
            v_max_fraction: 0.2,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 1 {
            return Err(Error::Config("pso: swarm_size must be >= 1".to_string()));
        }
        if !(self.w_max >= self.w_min && self.w_min > 0.0) {
            return Err(Error::Config("pso: need w_max >= w_min > 0".to_string()));
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return Err(Error::Config("pso: c1 and c2 must be >= 0".to_string()));
        }
        if !(self.v_max_fraction >= 0.0 && self.v_max_fraction.is_finite()) {
            return Err(Error::Config("pso: v_max_fraction must be >= 0".to_string()));
        }
        Ok(())
    }
}

/// Linearly decreasing inertia `w_max - (w_max - w_min) / iter_max · iter`.
pub fn inertia_weight(w_max: f64, w_min: f64, iter_max: usize, iter: usize) -> Result<f64> {
    if iter_max == 0 {
        return Err(Error::Domain("inertia schedule needs iter_max > 0".to_string()));
    }
    if iter > iter_max {
        return Err(Error::Domain(format!("iteration {iter} exceeds iter_max {iter_max}")));
    }
    if iter == iter_max {
        return Ok(w_min);
    }
    Ok(w_max - ((w_max - w_min) / iter_max as f64) * iter as f64)
}

fn same_len(name: &str, len: usize, expected: usize) -> Result<()> {
    if len == expected {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{name} has {len} entries, expected {expected}")))
    }
}

/// `w·v + c1·r1·(pbest - x) + c2·r2·(gbest - x)`, per dimension, unclamped.
#[allow(clippy::too_many_arguments)]
pub fn pso_velocity_update(
    v: &[f64],
    x: &[f64],
    pbest: &[f64],
    gbest: &[f64],
    w: f64,
    c1: f64,
    c2: f64,
    rand1: &[f64],
    rand2: &[f64],
) -> Result<Vec<f64>> {
    let n = x.len();
    same_len("velocity", v.len(), n)?;
    same_len("pbest", pbest.len(), n)?;
    same_len("gbest", gbest.len(), n)?;
    same_len("rand1", rand1.len(), n)?;
    same_len("rand2", rand2.len(), n)?;
    Ok((0..n)
        .map(|i| w * v[i] + c1 * rand1[i] * (pbest[i] - x[i]) + c2 * rand2[i] * (gbest[i] - x[i]))
        .collect())
}

pub fn clamp_velocity(v: &mut [f64], v_max: &[f64]) {
    for (vi, m) in v.iter_mut().zip(v_max) {
        *vi = vi.clamp(-m, *m);
    }
}

/// `x + v`, clipped to the bounds; a clipped dimension has its velocity zeroed.
pub fn pso_position_update(x: &mut [f64], v: &mut [f64], bounds: &Bounds) {
    for i in 0..x.len() {
        let next = x[i] + v[i];
        if next > bounds.hi[i] {
            x[i] = bounds.hi[i];
            v[i] = 0.0;
        } else if next < bounds.lo[i] {
            x[i] = bounds.lo[i];
            v[i] = 0.0;
        } else {
            x[i] = next;
        }
    }
}

/// Global-best PSO with linearly decreasing inertia.
///
/// Particle positions start uniform in the bounds and velocities uniform in
/// `±v_max`. Each generation every particle moves, is evaluated and updates
/// its personal best on strict improvement; the global best is refreshed once
/// all particles have moved.
pub fn pso_optimize<F>(fitness: F, bounds: &Bounds, cfg: &PsoConfig) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64,
{
    bounds.validate()?;
    cfg.validate()?;
    let dim = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let v_max: Vec<f64> = (0..dim).map(|i| cfg.v_max_fraction * bounds.width(i)).collect();

    let mut positions: Vec<Vec<f64>> = Vec::with_capacity(cfg.swarm_size);
    let mut velocities: Vec<Vec<f64>> = Vec::with_capacity(cfg.swarm_size);
    for _ in 0..cfg.swarm_size {
        positions.push(bounds.sample(&mut rng));
        velocities.push(
            v_max
                .iter()
                .map(|m| (2.0 * rng.random::<f64>() - 1.0) * m)
                .collect(),
        );
    }

    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        sanitize(fitness(x))
    };

    let mut pbest = positions.clone();
    let mut pbest_fit: Vec<f64> = positions.iter().map(|x| eval(x)).collect();
    let g = argmax(&pbest_fit);
    let mut gbest = pbest[g].clone();
    let mut gbest_fit = pbest_fit[g];
    let mut history = vec![gbest_fit];

    let mut rand1 = vec![0.0; dim];
    let mut rand2 = vec![0.0; dim];
    for t in 0..cfg.generations {
        let w = inertia_weight(cfg.w_max, cfg.w_min, cfg.generations, t)?;
        for p in 0..cfg.swarm_size {
            for i in 0..dim {
                rand1[i] = rng.random::<f64>();
                rand2[i] = rng.random::<f64>();
            }
            let mut v = pso_velocity_update(
                &velocities[p],
                &positions[p],
                &pbest[p],
                &gbest,
                w,
                cfg.c1,
                cfg.c2,
                &rand1,
                &rand2,
            )?;
            clamp_velocity(&mut v, &v_max);
            pso_position_update(&mut positions[p], &mut v, bounds);
            velocities[p] = v;

            let f = eval(&positions[p]);
            if f > pbest_fit[p] {
                pbest_fit[p] = f;
                pbest[p].clone_from(&positions[p]);
            }
        }
        let g = argmax(&pbest_fit);
        if pbest_fit[g] > gbest_fit {
            gbest_fit = pbest_fit[g];
            gbest.clone_from(&pbest[g]);
        }
        history.push(gbest_fit);
    }

    Ok(OptimizationResult {
        best_x: gbest,
        best_fitness: gbest_fit,
        history,
        evaluations,
    })
}
