use serde::Deserialize;
use std::path::Path;

use crate::error::{Error, Result};
use crate::modal::ZETA_THRESHOLD;
use crate::model::{
    ExcitationParams, GovernorTurbineParams, LineLoadParams, MachineParams, OperatingCondition, PssParams,
    SystemParams,
};
use crate::optim::{GaConfig, PsoConfig};
use crate::sim::SimConfig;

/// The only built-in parameter set.
pub const DEFAULT_PRESET: &str = "smib-default";

/// Built-in study: three loading conditions with fixed conventional PSS
/// settings for comparison.
pub const DEFAULT_CONFIG: &str = r#"# SMIB stabilizer study, three loading conditions.
# Powers and voltages in p.u., times in s.

seeds = [1, 2, 3, 4, 5]
zeta_threshold = 0.06

[system]
preset = "smib-default"

[pss]
t_w = 10.0        # washout time constant (s)

[sim]
t_end = 10.0      # s
dt = 0.01         # s

[ga]
pop_size = 20
generations = 10
generation_gap = 0.9
p_crossover = 0.95
p_mutation = 0.10

[pso]
swarm_size = 20
generations = 10
w_max = 1.0
w_min = 0.5
c1 = 1.0
c2 = 1.0
v_max_fraction = 0.2

[[scenario]]
id = "case1"
p = 0.4
q = 0.008
delta_p_l = 0.1
cpss = [6.1692, 0.6707, 0.1]   # [K_s, T1, T2]

[[scenario]]
id = "case2"
p = 0.4
q = 0.06
delta_p_l = 0.2
cpss = [6.2986, 0.6487, 0.1]

[[scenario]]
id = "case3"
p = 0.4
q = 0.06
delta_p_l = 0.3
x_e_scale = 1.1                # line reactance +10 %
cpss = [5.1944, 0.81, 0.1]
"#;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Used as the output sub-directory name.
    pub id: String,
    pub condition: OperatingCondition,
    pub cpss: Option<PssParams>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub system: SystemParams,
    pub scenarios: Vec<Scenario>,
    pub ga: GaConfig,
    pub pso: PsoConfig,
    /// Horizon and sample step; the step size of each run is the scenario's
    /// `delta_p_l`.
    pub sim: SimConfig,
    pub t_w: f64,
    /// Each optimizer runs once per seed and the best result is kept.
    pub seeds: Vec<u64>,
    pub zeta_threshold: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    system: RawSystem,
    #[serde(default, rename = "scenario")]
    scenarios: Vec<RawScenario>,
    #[serde(default)]
    ga: GaConfig,
    #[serde(default)]
    pso: PsoConfig,
    #[serde(default)]
    sim: RawSim,
    #[serde(default)]
    pss: RawPss,
    #[serde(default = "default_seeds")]
    seeds: Vec<u64>,
    #[serde(default = "default_threshold")]
    zeta_threshold: f64,
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4, 5]
}

fn default_threshold() -> f64 {
    ZETA_THRESHOLD
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    preset: Option<String>,
    machine: Option<MachineParams>,
    line: Option<LineLoadParams>,
    excitation: Option<ExcitationParams>,
    governor: Option<GovernorTurbineParams>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    t_end: f64,
    dt: f64,
}

impl Default for RawSim {
    fn default() -> Self {
        let d = SimConfig::default();
        Self { t_end: d.t_end, dt: d.dt }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPss {
    t_w: f64,
}

impl Default for RawPss {
    fn default() -> Self {
        Self {
            t_w: PssParams::DEFAULT_WASHOUT,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: String,
    p: f64,
    q: f64,
    delta_p_l: f64,
    #[serde(default = "one")]
    x_e_scale: f64,
    #[serde(default = "one")]
    k_a_scale: f64,
    cpss: Option<[f64; 3]>,
}

fn one() -> f64 {
    1.0
}

/// Line number (1-based) of the `index`-th `[[scenario]]` header.
fn scenario_line(src: &str, index: usize) -> Option<usize> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with("[[scenario]]"))
        .nth(index)
        .map(|(n, _)| n + 1)
}

fn table_line(src: &str, table: &str) -> Option<usize> {
    let header = format!("[{table}]");
    src.lines().position(|l| l.trim_start().starts_with(&header)).map(|n| n + 1)
}

fn at_line(line: Option<usize>, msg: String) -> Error {
    match line {
        Some(n) => Error::Config(format!("line {n}: {msg}")),
        None => Error::Config(msg),
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl ScenarioFile {
    /// Parses and validates a TOML scenario file. Errors carry the source line.
    pub fn parse(src: &str) -> Result<Self> {
        let raw: RawFile = toml::from_str(src).map_err(|e| {
            let line = e.span().map(|s| src[..s.start].matches('\n').count() + 1);
            at_line(line, e.message().to_string())
        })?;

        match raw.system.preset.as_deref() {
            None | Some(DEFAULT_PRESET) => {}
            Some(other) => {
                return Err(at_line(
                    table_line(src, "system"),
                    format!("unknown preset {other:?}, expected {DEFAULT_PRESET:?}"),
                ))
            }
        }
        let system = SystemParams {
            machine: raw.system.machine.unwrap_or_default(),
            line: raw.system.line.unwrap_or_default(),
            excitation: raw.system.excitation.unwrap_or_default(),
            governor: raw.system.governor.unwrap_or_default(),
        };
        system
            .validate()
            .map_err(|e| at_line(table_line(src, "system"), e.to_string()))?;

        if raw.scenarios.is_empty() {
            return Err(Error::Config("at least one [[scenario]] is required".to_string()));
        }
        let mut scenarios = Vec::with_capacity(raw.scenarios.len());
        for (i, s) in raw.scenarios.into_iter().enumerate() {
            let line = scenario_line(src, i);
            if !valid_id(&s.id) {
                return Err(at_line(
                    line,
                    format!("scenario id {:?} must be non-empty ASCII letters, digits, '-' or '_'", s.id),
                ));
            }
            if scenarios.iter().any(|other: &Scenario| other.id == s.id) {
                return Err(at_line(line, format!("duplicate scenario id {:?}", s.id)));
            }
            let condition = OperatingCondition::new(s.p, s.q, s.delta_p_l)
                .with_x_e_scale(s.x_e_scale)
                .with_k_a_scale(s.k_a_scale);
            condition
                .validate()
                .map_err(|e| at_line(line, format!("scenario {:?}: {e}", s.id)))?;
            let cpss = match s.cpss {
                Some(x) => Some(
                    PssParams::from_vector(&x, raw.pss.t_w)
                        .map_err(|e| at_line(line, format!("scenario {:?}: cpss: {e}", s.id)))?,
                ),
                None => None,
            };
            scenarios.push(Scenario {
                id: s.id,
                condition,
                cpss,
            });
        }

        let sim = SimConfig {
            t_end: raw.sim.t_end,
            dt: raw.sim.dt,
            ..SimConfig::default()
        };
        sim.validate().map_err(|e| at_line(table_line(src, "sim"), e.to_string()))?;
        raw.ga.validate().map_err(|e| at_line(table_line(src, "ga"), e.to_string()))?;
        raw.pso.validate().map_err(|e| at_line(table_line(src, "pso"), e.to_string()))?;
        if !(raw.pss.t_w > 0.0 && raw.pss.t_w.is_finite()) {
            return Err(at_line(table_line(src, "pss"), "t_w must be > 0".to_string()));
        }
        if raw.seeds.is_empty() {
            return Err(Error::Config("seeds must list at least one seed".to_string()));
        }
        if !raw.zeta_threshold.is_finite() {
            return Err(Error::Config("zeta_threshold must be finite".to_string()));
        }

        Ok(Self {
            system,
            scenarios,
            ga: raw.ga,
            pso: raw.pso,
            sim,
            t_w: raw.pss.t_w,
            seeds: raw.seeds,
            zeta_threshold: raw.zeta_threshold,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        Self::parse(&src).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// The built-in three-scenario study.
    pub fn default_study() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("built-in config is valid")
    }

    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    /// Keeps only the named scenario.
    pub fn retain_scenario(&mut self, id: &str) -> Result<()> {
        if self.scenario(id).is_none() {
            return Err(Error::Config(format!("no scenario with id {id:?}")));
        }
        self.scenarios.retain(|s| s.id == id);
        Ok(())
    }
}
