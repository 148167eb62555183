use crate::modal::guarded_objective_j;
use crate::model::{OperatingCondition, PssParams, SystemParams};

/// Fitness of a candidate `[K_s, T1, T2]`: the closed-loop objective `J`,
/// capped by the damping of any mode that does not decay.
///
/// Any failure to build or analyze the model scores -1, the worst damping
/// ratio, so the optimizers always see a finite value.
pub fn pss_fitness(
    system: &SystemParams,
    op: &OperatingCondition,
    t_w: f64,
) -> impl Fn(&[f64]) -> f64 + use<> {
    let system = *system;
    let op = *op;
    move |x: &[f64]| {
        PssParams::from_vector(x, t_w)
            .and_then(|pss| system.closed_loop(&pss, &op))
            .and_then(|model| guarded_objective_j(&model))
            .unwrap_or(-1.0)
    }
}
