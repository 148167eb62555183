//! Linearization constants checked against central differences of an
//! independent, unreduced network solution.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::fd_constants;
use smib_pss::model::{compute_heffron_constants, LineLoadParams, MachineParams, OperatingCondition};

fn assert_close(analytic: f64, oracle: f64, scale: f64, what: &str) {
    let err = (analytic - oracle).abs();
    assert!(
        err <= 1e-6 * scale,
        "{what}: analytic {analytic} vs finite difference {oracle} (err {err:e})"
    );
}

#[test]
fn steady_state_reproduces_terminal_power() {
    let m = MachineParams::default();
    let line = LineLoadParams::default();
    let op = OperatingCondition::new(0.4, 0.008, 0.1);
    let (_, te) = fd_constants(&m, &line, &op);
    // lossless stator: electrical torque equals terminal power
    assert!((te - 0.4).abs() < 1e-12, "{te}");
}

#[test]
fn constants_match_finite_differences_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let m = MachineParams::default();
    for _ in 0..10 {
        let line = LineLoadParams {
            r: rng.random_range(0.0..0.08),
            x_e: rng.random_range(0.4..1.2),
            g: rng.random_range(0.0..0.4),
            b: rng.random_range(0.0..0.4),
            v_t0: rng.random_range(0.95..1.1),
        };
        let op = OperatingCondition::new(rng.random_range(0.1..1.0), rng.random_range(-0.2..0.5), 0.1)
            .with_x_e_scale(rng.random_range(0.9..1.2));
        let k = compute_heffron_constants(&m, &line, &op).unwrap().as_array();
        let (fd, _) = fd_constants(&m, &line, &op);
        for (i, (a, o)) in k.iter().zip(fd).enumerate() {
            assert_close(*a, o, o.abs(), &format!("K{} at {op:?} {line:?}", i + 1));
        }
    }
}

#[test]
fn constants_match_finite_differences_at_fixture_conditions() {
    let m = MachineParams::default();
    let line = LineLoadParams::default();
    for op in [
        OperatingCondition::new(0.4, 0.008, 0.1),
        OperatingCondition::new(0.4, 0.06, 0.2),
        OperatingCondition::new(0.4, 0.06, 0.3).with_x_e_scale(1.1),
    ] {
        let k = compute_heffron_constants(&m, &line, &op).unwrap().as_array();
        let (fd, _) = fd_constants(&m, &line, &op);
        for (i, (a, o)) in k.iter().zip(fd).enumerate() {
            assert_close(*a, o, o.abs(), &format!("K{}", i + 1));
        }
    }
}
