//! Acceptance criteria. Each criterion prints one PASS or FAIL line; the
//! binary exits non-zero when any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{closed_form, fd_constants, peak, random_stable, read_tree, scalar_model};
use smib_pss::modal::{analyze, damping_ratio};
use smib_pss::model::{
    compute_heffron_constants, LineLoadParams, MachineParams, OperatingCondition, PssParams, SystemParams,
};
use smib_pss::optim::{ga_optimize, inertia_weight, pso_optimize, Bounds, GaConfig, PsoConfig};
use smib_pss::scenario::{
    evaluate_model, run_study, tune, Method, MethodResult, MethodSelection, ScenarioFile, TableFormat,
};
use smib_pss::sim::{simulate, SimConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const GAPSS: [f64; 3] = [6.2634, 0.4557, 0.5823];
const PSOPSS: [f64; 3] = [52.1596, 0.2353, 0.5176];

fn condition_one() -> OperatingCondition {
    OperatingCondition::new(0.4, 0.008, 0.1)
}

/// Eigenvalue to damping ratio for every tabulated mode.
fn damping_table() -> Outcome {
    let rows = [
        (0.1218, 5.452, -0.02233),
        (-0.3956, 8.6327, 0.04578),
        (-0.7011, 7.2045, 0.09693),
        (-0.8895, 8.4064, 0.105225),
        (0.1231, 5.405, -0.022769),
        (-0.4355, 8.5255, 0.051016),
        (-0.5502, 6.7845, 0.08083),
        (-0.6361, 7.0777, 0.089513),
        (0.1272, 5.6292, -0.022591),
        (-0.2107, 9.1457, 0.023032),
        (-0.3440, 5.8868, 0.05834),
        (-0.5372, 8.7165, 0.061513),
    ];
    let mut worst = 0.0f64;
    for (sigma, omega, zeta) in rows {
        let z = damping_ratio(sigma, omega).map_err(|e| e.to_string())?;
        worst = worst.max((z - zeta).abs());
    }
    ensure(worst <= 1e-3, format!("{} pairs, max |Δζ| = {worst:.2e}", rows.len()))
}

/// Open loop at condition 1 has one unstable oscillatory pair near 5.452 rad/s.
fn open_loop_instability() -> Outcome {
    let model = SystemParams::default().open_loop(&condition_one()).map_err(|e| e.to_string())?;
    let set = analyze(&model).map_err(|e| e.to_string())?;
    let unstable: Vec<_> = set.modes.iter().filter(|m| m.is_complex() && m.sigma > 0.0).collect();
    let Some(m) = unstable.first() else {
        return Err("no unstable complex pair".to_string());
    };
    let msg = format!("{} unstable pair(s), first {:.4} ± j{:.4}", unstable.len(), m.sigma, m.omega);
    ensure(unstable.len() == 1 && (m.omega - 5.452).abs() <= 0.3 * 5.452, msg)
}

fn fixture_damping(name: &str, x: [f64; 3], min_zeta: f64) -> Outcome {
    let model = SystemParams::default()
        .closed_loop(&PssParams::new(x[0], x[1], x[2]), &condition_one())
        .map_err(|e| e.to_string())?;
    let set = analyze(&model).map_err(|e| e.to_string())?;
    let zeta = set.objective();
    ensure(
        set.is_stable() && zeta >= min_zeta,
        format!("{name} stable = {}, min EM ζ = {zeta:.4} (need ≥ {min_zeta})", set.is_stable()),
    )
}

/// Both tuned fixtures stabilize condition 1 with enough damping.
fn fixture_controllers() -> Outcome {
    let pso = fixture_damping("PSOPSS", PSOPSS, 0.06);
    let ga = fixture_damping("GAPSS", GAPSS, 0.05);
    let msg = format!("{}; {}", pso.as_ref().unwrap_or_else(|e| e), ga.as_ref().unwrap_or_else(|e| e));
    ensure(pso.is_ok() && ga.is_ok(), msg)
}

/// Default GA and PSO reach J ≥ 0.06 on every default scenario for at least
/// eight of ten seeds, within the budget and a minute of wall time.
fn optimizer_success() -> Outcome {
    let base = ScenarioFile::default_study();
    let start = Instant::now();
    let mut summary = Vec::new();
    let mut ok = true;
    for scenario in &base.scenarios {
        for method in [Method::Ga, Method::Pso] {
            let mut hits = 0;
            let mut max_evals = 0;
            for seed in 1..=10 {
                let file = ScenarioFile {
                    seeds: vec![seed],
                    ..base.clone()
                };
                let run = tune(&file, scenario, method).map_err(|e| e.to_string())?;
                max_evals = max_evals.max(run.result.evaluations);
                let pss = PssParams::from_vector(&run.result.best_x, file.t_w).map_err(|e| e.to_string())?;
                let model = file.system.closed_loop(&pss, &scenario.condition).map_err(|e| e.to_string())?;
                let set = analyze(&model).map_err(|e| e.to_string())?;
                hits += usize::from(set.is_stable() && set.objective() >= 0.06);
            }
            ok &= hits >= 8 && max_evals <= 220;
            summary.push(format!("{} {}: {hits}/10 ({max_evals} evals)", scenario.id, method.tag()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(ok && secs < 60.0, format!("{}; {secs:.1} s", summary.join(", ")))
}

/// Longer runs on the negated sphere come close to the optimum.
fn sphere_benchmark() -> Outcome {
    let sphere = |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>();
    let cube = Bounds::new(vec![-5.0; 3], vec![5.0; 3]).map_err(|e| e.to_string())?;
    let (mut ga_ok, mut pso_ok) = (0, 0);
    for seed in 0..10 {
        let ga = ga_optimize(sphere, &cube, &GaConfig { generations: 50, seed, ..GaConfig::default() })
            .map_err(|e| e.to_string())?;
        let pso = pso_optimize(sphere, &cube, &PsoConfig { generations: 50, seed, ..PsoConfig::default() })
            .map_err(|e| e.to_string())?;
        ga_ok += usize::from(ga.best_fitness >= -5e-2);
        pso_ok += usize::from(pso.best_fitness >= -1e-2);
    }
    ensure(ga_ok >= 9 && pso_ok >= 9, format!("GA {ga_ok}/10, PSO {pso_ok}/10"))
}

/// Linear inertia schedule.
fn inertia_schedule() -> Outcome {
    let w = |k| inertia_weight(0.9, 0.6, 10, k).map_err(|e| e.to_string());
    let (start, mid, end) = (w(0)?, w(5)?, w(10)?);
    ensure(
        start == 0.9 && end == 0.6 && (mid - 0.75).abs() < 1e-12,
        format!("w(0) = {start}, w(5) = {mid}, w(10) = {end}"),
    )
}

/// Integrator against the matrix exponential and a first-order lag.
fn integrator_accuracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = SimConfig {
        t_end: 5.0,
        dt: 0.01,
        disturbance: 0.7,
    };
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let model = random_stable(&mut rng, 4);
        let traj = simulate(&model, &cfg).map_err(|e| e.to_string())?;
        let scale = peak(&traj);
        for (t, x) in traj.times.iter().zip(&traj.states) {
            let exact = closed_form(&model, cfg.disturbance, *t);
            let err = x.iter().zip(exact.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            worst = worst.max(err / scale);
        }
    }
    let lag = simulate(
        &scalar_model(-1.0, 1.0),
        &SimConfig {
            t_end: 2.0,
            dt: 0.01,
            disturbance: 1.0,
        },
    )
    .map_err(|e| e.to_string())?;
    let k = lag.times.iter().position(|t| (t - 1.0).abs() < 1e-12).ok_or("t = 1 not sampled")?;
    let x1 = lag.states[k][0];
    let lag_err = (x1 - (1.0 - (-1.0f64).exp())).abs();
    ensure(
        worst <= 1e-6 && lag_err <= 1e-6 && (x1 - 0.6321).abs() < 1e-4,
        format!("20 systems, max relative error {worst:.2e}; x(1) = {x1:.6}"),
    )
}

/// Time-domain ranking of the controllers at condition 1.
fn time_domain_ordering() -> Outcome {
    let sys = SystemParams::default();
    let op = condition_one();
    let file = ScenarioFile::default_study();
    let cpss = file.scenario("case1").and_then(|s| s.cpss).ok_or("case1 has no CPSS")?;
    let sim = SimConfig {
        disturbance: 0.1,
        ..SimConfig::default()
    };
    let eval = |method, pss: Option<PssParams>| -> Result<MethodResult, String> {
        let model = match pss {
            Some(p) => sys.closed_loop(&p, &op),
            None => sys.open_loop(&op),
        }
        .map_err(|e| e.to_string())?;
        evaluate_model(method, &model, pss, &sim, file.zeta_threshold).map_err(|e| e.to_string())
    };
    let open = eval(Method::OpenLoop, None)?;
    let c = eval(Method::Cpss, Some(cpss))?;
    let g = eval(Method::Ga, Some(PssParams::new(GAPSS[0], GAPSS[1], GAPSS[2])))?;
    let p = eval(Method::Pso, Some(PssParams::new(PSOPSS[0], PSOPSS[1], PSOPSS[2])))?;
    let ise = [&open, &c, &g, &p].map(|r| r.metrics.ise_speed);
    let ang = [&c, &g, &p].map(|r| r.metrics.peak_angle);
    ensure(
        ise[0] > ise[1] && ise[1] > ise[2] && ise[2] >= ise[3] && ang[0] > ang[1] && ang[1] > ang[2],
        format!(
            "ISE(Δω) open {:.3e}, C {:.3e}, G {:.3e}, P {:.3e}; peak Δδ C {:.4}, G {:.4}, P {:.4}",
            ise[0], ise[1], ise[2], ise[3], ang[0], ang[1], ang[2]
        ),
    )
}

/// Linearization constants against finite differences of the full network.
fn linearization_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let m = MachineParams::default();
    let mut worst = 0.0f64;
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
        let k = compute_heffron_constants(&m, &line, &op).map_err(|e| e.to_string())?.as_array();
        let (fd, _) = fd_constants(&m, &line, &op);
        for (a, o) in k.iter().zip(fd) {
            worst = worst.max((a - o).abs() / o.abs());
        }
    }
    let lossless = LineLoadParams {
        r: 0.0,
        g: 0.0,
        b: 0.0,
        ..LineLoadParams::default()
    };
    let k3 = compute_heffron_constants(&m, &lossless, &condition_one()).map_err(|e| e.to_string())?.k3;
    ensure(
        worst <= 1e-6 && (k3 - 0.6025).abs() <= 1e-4,
        format!("10 points, max relative error {worst:.2e}; lossless K3 = {k3:.5}"),
    )
}

/// The default study is byte-for-byte reproducible.
fn reproducible_study() -> Outcome {
    let file = ScenarioFile::default_study();
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_study(&file, a.path(), MethodSelection::BOTH, TableFormat::Txt).map_err(|e| e.to_string())?;
    run_study(&file, b.path(), MethodSelection::BOTH, TableFormat::Txt).map_err(|e| e.to_string())?;
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    ensure(!ta.is_empty() && ta == tb, format!("{} files compared", ta.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("eigenvalue to damping ratio", damping_table),
        ("open-loop instability at condition 1", open_loop_instability),
        ("fixture controllers stabilize condition 1", fixture_controllers),
        ("optimizers reach the damping threshold", optimizer_success),
        ("sphere benchmark", sphere_benchmark),
        ("inertia schedule", inertia_schedule),
        ("integrator accuracy", integrator_accuracy),
        ("time-domain ordering", time_domain_ordering),
        ("linearization oracle", linearization_oracle),
        ("reproducible study", reproducible_study),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += usize::from(outcome.is_err());
        println!("{tag} criterion {} ({name}): {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
