use nalgebra::Complex;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::study::{Method, MethodResult, ScenarioReport, StudyReport};
use crate::error::{Error, Result};
use crate::modal::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    /// Comma-separated tables only.
    #[default]
    Csv,
    /// Comma-separated tables plus aligned text copies (`*.txt`).
    Txt,
}

/// `a ± jb` with four decimals; real eigenvalues print as `a`.
pub fn format_eigenvalue(z: Complex<f64>) -> String {
    if z.im == 0.0 {
        format!("{:.4}", z.re)
    } else {
        format!("{:.4} ± j{:.4}", z.re, z.im.abs())
    }
}

/// Right-aligned text table.
pub fn aligned_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{}{c}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out += &line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",") + "\n";
    for row in rows {
        out += &row.join(",");
        out.push('\n');
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Header of the damping table, one column per method.
pub fn damping_header() -> String {
    Method::ALL.map(Method::tag).join(",")
}

/// One damping-table row; absent methods are empty fields. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn damping_row(values: [Option<f64>; 4]) -> String {
    values.map(opt).join(",")
}

/// Parses a damping table written by [`emit_tables`] back into
/// `(method tag, value)` pairs.
pub fn parse_damping_table(text: &str) -> Result<Vec<(String, Option<f64>)>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Config("damping table is empty".to_string()))?;
    let row = lines
        .next()
        .ok_or_else(|| Error::Config("damping table has no data row".to_string()))?;
    let names: Vec<&str> = header.split(',').collect();
    let cells: Vec<&str> = row.split(',').collect();
    if names.len() != cells.len() {
        return Err(Error::Config(format!(
            "damping table has {} columns but {} values",
            names.len(),
            cells.len()
        )));
    }
    names
        .iter()
        .zip(cells)
        .map(|(n, c)| {
            let c = c.trim();
            let v = if c.is_empty() {
                None
            } else {
                Some(
                    c.parse::<f64>()
                        .map_err(|e| Error::Config(format!("damping value {c:?} for {n}: {e}")))?,
                )
            };
            Ok((n.trim().to_string(), v))
        })
        .collect()
}

fn damping_values(r: &ScenarioReport) -> [Option<f64>; 4] {
    Method::ALL.map(|m| r.result(m).map(|x| x.zeta))
}

fn is_em(r: &MethodResult, z: Complex<f64>) -> bool {
    r.em_modes.iter().any(|m| m.re == z.re && m.im == z.im.abs())
}

fn eigen_rows(r: &ScenarioReport) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for m in &r.results {
        for z in &m.eigenvalues {
            let mode = Mode::from_eigenvalue(*z);
            rows.push(vec![
                m.method.tag().to_string(),
                z.re.to_string(),
                z.im.to_string(),
                mode.zeta.to_string(),
                mode.freq_hz.to_string(),
                is_em(m, *z).to_string(),
            ]);
        }
    }
    rows
}

const EIGEN_HEADER: [&str; 6] = ["method", "re", "im", "zeta", "freq_hz", "em"];

fn eigen_text(r: &ScenarioReport) -> String {
    let mut rows = Vec::new();
    for m in &r.results {
        for z in m.eigenvalues.iter().filter(|z| z.im >= 0.0) {
            let mode = Mode::from_eigenvalue(*z);
            rows.push(vec![
                m.method.tag().to_string(),
                format_eigenvalue(*z),
                format!("{:.5}", mode.zeta),
                format!("{:.4}", mode.freq_hz),
                if is_em(m, *z) { "EM" } else { "" }.to_string(),
            ]);
        }
    }
    aligned_table(&["method", "eigenvalue", "zeta", "f (Hz)", ""], &rows)
}

const PARAMS_HEADER: [&str; 8] = ["method", "k_s", "t1", "t2", "t_w", "zeta", "seed", "evaluations"];

fn params_rows(r: &ScenarioReport, text: bool) -> Vec<Vec<String>> {
    let num = |x: f64| if text { format!("{x:.4}") } else { x.to_string() };
    r.results
        .iter()
        .filter_map(|m| {
            let p = m.pss?;
            let (seed, evals) = match &m.tuning {
                Some(t) => (t.seed.to_string(), t.result.evaluations.to_string()),
                None => (String::new(), String::new()),
            };
            Some(vec![
                m.method.tag().to_string(),
                num(p.k_s),
                num(p.t1),
                num(p.t2),
                num(p.t_w),
                if text { format!("{:.5}", m.zeta) } else { m.zeta.to_string() },
                seed,
                evals,
            ])
        })
        .collect()
}

const METRICS_HEADER: [&str; 8] = [
    "method",
    "ise_speed",
    "ise_angle",
    "peak_speed",
    "peak_angle",
    "settling_speed",
    "stable",
    "overflow",
];

fn metrics_rows(r: &ScenarioReport, text: bool) -> Vec<Vec<String>> {
    let num = |x: f64| if text { format!("{x:.4e}") } else { x.to_string() };
    r.results
        .iter()
        .map(|m| {
            let t = &m.metrics;
            let settle = match (t.settling_speed, text) {
                (Some(s), true) => format!("{s:.2}"),
                (Some(s), false) => s.to_string(),
                (None, true) => "not settled".to_string(),
                (None, false) => String::new(),
            };
            vec![
                m.method.tag().to_string(),
                num(t.ise_speed),
                num(t.ise_angle),
                num(t.peak_speed),
                num(t.peak_angle),
                settle,
                m.stable.to_string(),
                t.overflow.to_string(),
            ]
        })
        .collect()
}

fn damping_text(r: &ScenarioReport) -> String {
    let row: Vec<String> = damping_values(r)
        .iter()
        .map(|v| v.map_or_else(|| "-".to_string(), |x| format!("{x:.5}")))
        .collect();
    aligned_table(&Method::ALL.map(Method::tag), &[row])
}

struct Writer<'a> {
    root: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, rel: PathBuf, contents: &[u8]) -> Result<()> {
        let path = self.root.join(&rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.files.push(rel);
        Ok(())
    }
}

fn scenario_heading(r: &ScenarioReport) -> String {
    let c = &r.scenario.condition;
    format!(
        "P = {}, Q = {}, dP_L = {}, x_e scale = {}, K_A scale = {}",
        c.p, c.q, c.delta_p_l, c.x_e_scale, c.k_a_scale
    )
}

/// Writes every table of the report under `out_dir` and returns the written
/// paths relative to it. `report.txt` is written last and indexes the rest.
pub fn emit_tables(report: &StudyReport, out_dir: &Path, format: TableFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut w = Writer {
        root: out_dir,
        files: Vec::new(),
    };
    let mut summary = String::new();
    let _ = writeln!(summary, "SMIB stabilizer study");
    let _ = writeln!(summary, "damping threshold: {}", report.zeta_threshold);
    let _ = writeln!(
        summary,
        "seeds: {}",
        report.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
    );

    for outcome in &report.scenarios {
        let _ = writeln!(summary, "\n== {} ==", outcome.id);
        let r = match &outcome.report {
            Ok(r) => r,
            Err(e) => {
                let _ = writeln!(summary, "FAILED: {e}");
                continue;
            }
        };
        let dir = PathBuf::from(&outcome.id);
        w.write(dir.join("eigen.csv"), csv(&EIGEN_HEADER, &eigen_rows(r)).as_bytes())?;
        w.write(
            dir.join("damping.csv"),
            format!("{}\n{}\n", damping_header(), damping_row(damping_values(r))).as_bytes(),
        )?;
        w.write(dir.join("params.csv"), csv(&PARAMS_HEADER, &params_rows(r, false)).as_bytes())?;
        w.write(dir.join("metrics.csv"), csv(&METRICS_HEADER, &metrics_rows(r, false)).as_bytes())?;
        for m in &r.results {
            let mut buf = Vec::new();
            m.trajectory.write_csv(&mut buf)?;
            w.write(dir.join(format!("traj-{}.csv", m.method.tag())), &buf)?;
        }
        if format == TableFormat::Txt {
            w.write(dir.join("eigen.txt"), eigen_text(r).as_bytes())?;
            w.write(dir.join("damping.txt"), damping_text(r).as_bytes())?;
            w.write(dir.join("params.txt"), aligned_table(&PARAMS_HEADER, &params_rows(r, true)).as_bytes())?;
            w.write(dir.join("metrics.txt"), aligned_table(&METRICS_HEADER, &metrics_rows(r, true)).as_bytes())?;
        }

        let _ = writeln!(summary, "{}", scenario_heading(r));
        let k = r.k.as_array();
        let _ = writeln!(
            summary,
            "K1..K6 = {}",
            k.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ")
        );
        let _ = writeln!(summary, "\nminimum electromechanical damping ratio\n{}", damping_text(r));
        let _ = writeln!(summary, "modes\n{}", eigen_text(r));
        let _ = writeln!(summary, "stabilizer parameters\n{}", aligned_table(&PARAMS_HEADER, &params_rows(r, true)));
        let _ = writeln!(summary, "step response (dP_L = {})\n{}", r.scenario.condition.delta_p_l, aligned_table(&METRICS_HEADER, &metrics_rows(r, true)));
        for m in r.results.iter().filter(|m| m.method.is_optimized()) {
            let _ = writeln!(
                summary,
                "{}: zeta = {:.5} {} threshold {}",
                m.method.tag(),
                m.zeta,
                if m.meets_threshold { ">=" } else { "<" },
                report.zeta_threshold
            );
        }
    }

    let _ = writeln!(summary, "\n== files ==");
    for f in &w.files {
        let _ = writeln!(summary, "{}", f.display());
    }
    w.write(PathBuf::from("report.txt"), summary.as_bytes())?;
    Ok(w.files)
}
