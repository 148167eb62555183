//! `smib-pss`: open-loop analysis, stabilizer tuning, step-response simulation
//! and the full comparison study.
//!
//! Exit status: 0 on success, 1 on invalid input, 2 when a tuned stabilizer
//! misses the damping threshold.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use smib_pss::modal::analyze_with_threshold;
use smib_pss::model::PssParams;
use smib_pss::scenario::{
    aligned_table, evaluate_model, format_eigenvalue, run_study, tune, Method, MethodSelection, ScenarioFile,
    TableFormat,
};
use smib_pss::Error;

#[derive(Parser)]
#[command(name = "smib-pss", version, about = "Power system stabilizer tuning for a single machine infinite bus system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML); the built-in three-scenario study when omitted
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Restrict to one scenario id
    #[arg(long, value_name = "ID")]
    scenario: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Txt)]
    format: Format,
}

#[derive(Args)]
struct Tuning {
    /// Use this single seed instead of the configured list
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
}

#[derive(Subcommand)]
enum Command {
    /// Open-loop modes of every scenario
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Tune the stabilizer with GA and/or PSO
    Tune {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Step response for given stabilizer parameters (open loop if omitted)
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, requires_all = ["t1", "t2"])]
        ks: Option<f64>,
        #[arg(long, requires = "ks")]
        t1: Option<f64>,
        #[arg(long, requires = "ks")]
        t2: Option<f64>,
        /// Directory for trajectory files
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Open loop, CPSS, GA and PSO for every scenario, with tables and report
    Study {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Txt,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ga,
    Pso,
    Both,
}

impl From<MethodArg> for MethodSelection {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Ga => MethodSelection { ga: true, pso: false },
            MethodArg::Pso => MethodSelection { ga: false, pso: true },
            MethodArg::Both => MethodSelection::BOTH,
        }
    }
}

enum Failure {
    Invalid(Error),
    BelowThreshold,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.into())
    }
}

fn load(common: &Common) -> Result<ScenarioFile, Error> {
    let mut file = match &common.config {
        Some(p) => ScenarioFile::load(p)?,
        None => ScenarioFile::default_study(),
    };
    if let Some(id) = &common.scenario {
        file.retain_scenario(id)?;
    }
    Ok(file)
}

fn emit(out: &mut impl Write, format: Format, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
    match format {
        Format::Txt => out.write_all(aligned_table(header, rows).as_bytes()),
        Format::Csv => {
            writeln!(out, "{}", header.join(","))?;
            for r in rows {
                writeln!(out, "{}", r.join(","))?;
            }
            Ok(())
        }
    }
}

fn analyze(common: &Common) -> Result<(), Failure> {
    let file = load(common)?;
    let mut out = std::io::stdout().lock();
    let mut rows = Vec::new();
    for s in &file.scenarios {
        let model = file.system.open_loop(&s.condition)?;
        let set = analyze_with_threshold(&model, file.zeta_threshold)?;
        for m in &set.modes {
            let (eig, zeta, freq) = match common.format {
                Format::Txt => (format_eigenvalue(m.eigenvalue()), format!("{:.5}", m.zeta), format!("{:.4}", m.freq_hz)),
                Format::Csv => (format!("{}{:+}j", m.sigma, m.omega), m.zeta.to_string(), m.freq_hz.to_string()),
            };
            rows.push(vec![s.id.clone(), eig, zeta, freq, m.is_em.to_string()]);
        }
    }
    emit(&mut out, common.format, &["scenario", "eigenvalue", "zeta", "freq_hz", "em"], &rows)?;
    Ok(())
}

fn with_seed(mut file: ScenarioFile, seed: Option<u64>) -> ScenarioFile {
    if let Some(s) = seed {
        file.seeds = vec![s];
    }
    file
}

fn tune_cmd(common: &Common, tuning: &Tuning) -> Result<(), Failure> {
    let file = with_seed(load(common)?, tuning.seed);
    let methods = MethodSelection::from(tuning.method);
    let mut rows = Vec::new();
    let mut passed = true;
    for s in &file.scenarios {
        for method in [Method::Ga, Method::Pso].into_iter().filter(|m| methods.includes(*m)) {
            let run = tune(&file, s, method)?;
            let x = &run.result.best_x;
            let ok = run.result.best_fitness >= file.zeta_threshold;
            passed &= ok;
            let num = |v: f64| match common.format {
                Format::Txt => format!("{v:.4}"),
                Format::Csv => v.to_string(),
            };
            rows.push(vec![
                s.id.clone(),
                method.tag().to_string(),
                num(x[0]),
                num(x[1]),
                num(x[2]),
                num(run.result.best_fitness),
                run.seed.to_string(),
                ok.to_string(),
            ]);
        }
    }
    let mut out = std::io::stdout().lock();
    emit(&mut out, common.format, &["scenario", "method", "k_s", "t1", "t2", "zeta", "seed", "meets_threshold"], &rows)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::BelowThreshold)
    }
}

fn simulate_cmd(common: &Common, gains: Option<[f64; 3]>, out_dir: Option<&Path>) -> Result<(), Failure> {
    let file = load(common)?;
    let pss = gains.map(|g| PssParams::from_vector(&g, file.t_w)).transpose()?;
    let mut rows = Vec::new();
    for s in &file.scenarios {
        let (method, model) = match &pss {
            Some(p) => (Method::Cpss, file.system.closed_loop(p, &s.condition)?),
            None => (Method::OpenLoop, file.system.open_loop(&s.condition)?),
        };
        let sim = smib_pss::sim::SimConfig {
            disturbance: s.condition.delta_p_l,
            ..file.sim
        };
        let r = evaluate_model(method, &model, pss, &sim, file.zeta_threshold)?;
        if let Some(dir) = out_dir {
            let d = dir.join(&s.id);
            std::fs::create_dir_all(&d)?;
            let name = if pss.is_some() { "traj-pss.csv" } else { "traj-open_loop.csv" };
            let f = std::io::BufWriter::new(std::fs::File::create(d.join(name))?);
            r.trajectory.write_csv(f)?;
        }
        let m = &r.metrics;
        let settle = m.settling_speed.map_or_else(|| "not settled".to_string(), |t| format!("{t}"));
        rows.push(vec![
            s.id.clone(),
            m.ise_speed.to_string(),
            m.ise_angle.to_string(),
            m.peak_speed.to_string(),
            m.peak_angle.to_string(),
            settle,
            r.zeta.to_string(),
        ]);
    }
    let mut out = std::io::stdout().lock();
    emit(&mut out, common.format, &["scenario", "ise_speed", "ise_angle", "peak_speed", "peak_angle", "settling_speed", "zeta"], &rows)?;
    Ok(())
}

fn study_cmd(common: &Common, tuning: &Tuning, out: &Path) -> Result<(), Failure> {
    let file = with_seed(load(common)?, tuning.seed);
    let format = match common.format {
        Format::Csv => TableFormat::Csv,
        Format::Txt => TableFormat::Txt,
    };
    let report = run_study(&file, out, tuning.method.into(), format)?;
    let summary = std::fs::read_to_string(out.join("report.txt"))?;
    std::io::stdout().lock().write_all(summary.as_bytes())?;
    if report.tuning_passed() {
        Ok(())
    } else {
        Err(Failure::BelowThreshold)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Analyze { common } => analyze(common),
        Command::Tune { common, tuning } => tune_cmd(common, tuning),
        Command::Simulate { common, ks, t1, t2, out } => {
            let gains = ks.map(|k| [k, t1.unwrap_or_default(), t2.unwrap_or_default()]);
            simulate_cmd(common, gains, out.as_deref())
        }
        Command::Study { common, tuning, out } => study_cmd(common, tuning, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::BelowThreshold) => {
            eprintln!("a tuned stabilizer is below the damping threshold");
            ExitCode::from(2)
        }
    }
}
