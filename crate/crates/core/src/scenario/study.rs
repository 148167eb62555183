use nalgebra::Complex;
use std::path::{Path, PathBuf};

use super::config::{Scenario, ScenarioFile};
use super::tables::{emit_tables, TableFormat};
use crate::error::{Error, Result};
use crate::modal::{analyze_with_threshold, eigenvalues};
use crate::model::{HeffronConstants, PssParams, StateSpaceModel, D_DELTA, D_OMEGA};
use crate::optim::{ga_optimize, pso_optimize, pss_fitness, Bounds, OptimizationResult};
use crate::sim::{response_metrics, simulate, SimConfig, Trajectory, SETTLE_BAND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    OpenLoop,
    Cpss,
    Ga,
    Pso,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::OpenLoop, Method::Cpss, Method::Ga, Method::Pso];

    /// Column and file-name tag.
    pub fn tag(self) -> &'static str {
        match self {
            Method::OpenLoop => "open_loop",
            Method::Cpss => "cpss",
            Method::Ga => "gapss",
            Method::Pso => "psopss",
        }
    }

    pub fn is_optimized(self) -> bool {
        matches!(self, Method::Ga | Method::Pso)
    }
}

/// Which optimizers a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodSelection {
    pub ga: bool,
    pub pso: bool,
}

impl MethodSelection {
    pub const BOTH: Self = Self { ga: true, pso: true };

    pub fn includes(self, m: Method) -> bool {
        match m {
            Method::OpenLoop | Method::Cpss => true,
            Method::Ga => self.ga,
            Method::Pso => self.pso,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMetrics {
    pub ise_speed: f64,
    pub ise_angle: f64,
    pub peak_speed: f64,
    pub peak_angle: f64,
    /// Δω settling time, `None` if it never settles within the horizon.
    pub settling_speed: Option<f64>,
    pub overflow: bool,
}

/// How a tuned controller was found.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningRun {
    pub seed: u64,
    pub result: OptimizationResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: Method,
    pub pss: Option<PssParams>,
    /// All eigenvalues, ordered by descending real part.
    pub eigenvalues: Vec<Complex<f64>>,
    /// Tuning objective: minimum electromechanical damping ratio.
    pub zeta: f64,
    pub em_modes: Vec<Complex<f64>>,
    pub stable: bool,
    pub meets_threshold: bool,
    pub metrics: TimeMetrics,
    pub trajectory: Trajectory,
    pub tuning: Option<TuningRun>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub k: HeffronConstants,
    pub results: Vec<MethodResult>,
}

impl ScenarioReport {
    pub fn result(&self, m: Method) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.method == m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub id: String,
    pub report: std::result::Result<ScenarioReport, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub zeta_threshold: f64,
    pub seeds: Vec<u64>,
    pub scenarios: Vec<ScenarioOutcome>,
    /// Files written, relative to the output directory, in write order.
    pub files: Vec<PathBuf>,
}

impl StudyReport {
    /// Every scenario ran and every optimized controller meets the threshold.
    pub fn tuning_passed(&self) -> bool {
        self.scenarios.iter().all(|s| match &s.report {
            Ok(r) => r
                .results
                .iter()
                .filter(|m| m.method.is_optimized())
                .all(|m| m.meets_threshold),
            Err(_) => false,
        })
    }
}

/// Modal and time-domain evaluation of one (open or closed loop) model.
pub fn evaluate_model(
    method: Method,
    model: &StateSpaceModel,
    pss: Option<PssParams>,
    sim: &SimConfig,
    zeta_threshold: f64,
) -> Result<MethodResult> {
    let set = analyze_with_threshold(model, zeta_threshold)?;
    let values = eigenvalues(&model.a)?;
    let traj = simulate(model, sim)?;
    let speed = response_metrics(&traj, D_OMEGA, SETTLE_BAND)?;
    let angle = response_metrics(&traj, D_DELTA, SETTLE_BAND)?;
    let metrics = TimeMetrics {
        ise_speed: speed.ise_speed.unwrap_or(0.0),
        ise_angle: speed.ise_angle.unwrap_or(0.0),
        peak_speed: speed.peak_overshoot,
        peak_angle: angle.peak_overshoot,
        settling_speed: speed.settling_time,
        overflow: traj.overflow,
    };
    Ok(MethodResult {
        method,
        pss,
        stable: values.iter().all(|z| z.re < 0.0),
        eigenvalues: values,
        zeta: set.objective(),
        em_modes: set.em_modes().map(|m| m.eigenvalue()).collect(),
        meets_threshold: set.meets_threshold(),
        metrics,
        trajectory: traj,
        tuning: None,
    })
}

/// Runs one optimizer once per seed and keeps the best result; the first seed
/// wins ties.
pub fn tune(file: &ScenarioFile, scenario: &Scenario, method: Method) -> Result<TuningRun> {
    let fitness = pss_fitness(&file.system, &scenario.condition, file.t_w);
    let bounds = Bounds::pss();
    let mut best: Option<TuningRun> = None;
    for &seed in &file.seeds {
        let result = match method {
            Method::Ga => ga_optimize(&fitness, &bounds, &crate::optim::GaConfig { seed, ..file.ga })?,
            Method::Pso => pso_optimize(&fitness, &bounds, &crate::optim::PsoConfig { seed, ..file.pso })?,
            _ => return Err(Error::InvalidParameter(format!("{} is not an optimizer", method.tag()))),
        };
        if best.as_ref().is_none_or(|b| result.best_fitness > b.result.best_fitness) {
            best = Some(TuningRun { seed, result });
        }
    }
    best.ok_or_else(|| Error::Config("no seeds configured".to_string()))
}

fn sim_for(file: &ScenarioFile, scenario: &Scenario) -> SimConfig {
    SimConfig {
        disturbance: scenario.condition.delta_p_l,
        ..file.sim
    }
}

/// Open loop, fixed CPSS (when given) and the selected tuned controllers for
/// one scenario.
pub fn run_scenario(file: &ScenarioFile, scenario: &Scenario, methods: MethodSelection) -> Result<ScenarioReport> {
    let op = &scenario.condition;
    let sim = sim_for(file, scenario);
    let k = file.system.heffron_constants(op)?;
    let mut results = Vec::new();

    let open = file.system.open_loop(op)?;
    results.push(evaluate_model(Method::OpenLoop, &open, None, &sim, file.zeta_threshold)?);

    if let Some(cpss) = scenario.cpss {
        let model = file.system.closed_loop(&cpss, op)?;
        results.push(evaluate_model(Method::Cpss, &model, Some(cpss), &sim, file.zeta_threshold)?);
    }

    for method in [Method::Ga, Method::Pso] {
        if !methods.includes(method) {
            continue;
        }
        let run = tune(file, scenario, method)?;
        let pss = PssParams::from_vector(&run.result.best_x, file.t_w)?;
        let model = file.system.closed_loop(&pss, op)?;
        let mut r = evaluate_model(method, &model, Some(pss), &sim, file.zeta_threshold)?;
        r.tuning = Some(run);
        results.push(r);
    }

    Ok(ScenarioReport {
        scenario: scenario.clone(),
        k,
        results,
    })
}

/// Full pipeline over every scenario. A failing scenario is recorded in the
/// report and the remaining ones still run. Tables, trajectories and
/// `report.txt` are written under `out_dir`.
pub fn run_study(
    file: &ScenarioFile,
    out_dir: &Path,
    methods: MethodSelection,
    format: TableFormat,
) -> Result<StudyReport> {
    let scenarios = file
        .scenarios
        .iter()
        .map(|s| ScenarioOutcome {
            id: s.id.clone(),
            report: run_scenario(file, s, methods).map_err(|e| e.to_string()),
        })
        .collect();
    let mut report = StudyReport {
        zeta_threshold: file.zeta_threshold,
        seeds: file.seeds.clone(),
        scenarios,
        files: Vec::new(),
    };
    report.files = emit_tables(&report, out_dir, format)?;
    Ok(report)
}
