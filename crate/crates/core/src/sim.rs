//! Step-disturbance simulation of `dx/dt = A x + b ΔP_L` and response metrics.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::modal::eigenvalues;
use crate::model::{StateSpaceModel, D_DELTA, D_OMEGA};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt: f64,
    /// Step magnitude of ΔP_L applied at t = 0.
    pub disturbance: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            t_end: 10.0,
            dt: 0.01,
            disturbance: 0.1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter("sim: t_end must be > 0".to_string()));
        }
        if !(self.dt > 0.0 && self.dt < self.t_end) {
            return Err(Error::InvalidParameter("sim: dt must lie in (0, t_end)".to_string()));
        }
        if !self.disturbance.is_finite() {
            return Err(Error::InvalidParameter("sim: disturbance must be finite".to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One state vector per sample, in `labels` order.
    pub states: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    /// Equilibrium `-A⁻¹ b ΔP_L` when `A` is invertible.
    pub equilibrium: Option<Vec<f64>>,
    /// Integration stopped early on a non-finite state.
    pub overflow: bool,
}

impl Trajectory {
    /// Builds a trajectory from sampled data, e.g. for post-processing an
    /// external signal.
    pub fn from_samples(times: Vec<f64>, states: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::Dimension(format!(
                "{} sample times for {} state rows",
                times.len(),
                states.len()
            )));
        }
        if states.iter().any(|row| row.len() != labels.len()) {
            return Err(Error::Dimension("state row length differs from label count".to_string()));
        }
        if times.windows(2).any(|w| w[1].is_nan() || w[1] <= w[0]) {
            return Err(Error::InvalidParameter("sample times must increase strictly".to_string()));
        }
        Ok(Self {
            times,
            states,
            labels,
            equilibrium: None,
            overflow: false,
        })
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn signal(&self, label: &str) -> Result<Vec<f64>> {
        let i = self.index_of(label)?;
        Ok(self.states.iter().map(|row| row[i]).collect())
    }

    /// Comma-separated export: header `t,<labels...>`, one row per sample.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "t")?;
        for l in &self.labels {
            write!(out, ",{l}")?;
        }
        writeln!(out)?;
        for (t, row) in self.times.iter().zip(&self.states) {
            write!(out, "{t:e}")?;
            for v in row {
                write!(out, ",{v:e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Fastest time constant estimate `1 / max_i Σ_j |a_ij|` (Gershgorin).
/// Smallest time constant `1/ρ(A)` from the spectral radius, or from the
/// Gershgorin row-sum bound when the eigenvalues are unavailable.
fn fastest_time_constant(a: &DMatrix<f64>) -> f64 {
    let radius = match eigenvalues(a) {
        Ok(ev) => ev.iter().map(|z| z.norm()).fold(0.0, f64::max),
        Err(_) => a
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max),
    };
    if radius > 0.0 {
        1.0 / radius
    } else {
        f64::INFINITY
    }
}

/// Classic fixed-step RK4 from rest, sampled every `cfg.dt`. The internal step
/// is `min(dt, T_min/10)` rounded down so that it divides `dt`.
pub fn simulate(model: &StateSpaceModel, cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let n = model.order();
    let a = &model.a;
    let u = &model.b_dist * cfg.disturbance;

    let h_max = cfg.dt.min(fastest_time_constant(a) / 10.0);
    let substeps = (cfg.dt / h_max).ceil().max(1.0) as usize;
    let h = cfg.dt / substeps as f64;
    let samples = (cfg.t_end / cfg.dt).round() as usize;

    let f = |x: &DVector<f64>| a * x + &u;

    let mut x = DVector::zeros(n);
    let mut times = Vec::with_capacity(samples + 1);
    let mut states = Vec::with_capacity(samples + 1);
    times.push(0.0);
    states.push(x.as_slice().to_vec());
    let mut overflow = false;

    'outer: for k in 1..=samples {
        for _ in 0..substeps {
            let k1 = f(&x);
            let k2 = f(&(&x + &k1 * (0.5 * h)));
            let k3 = f(&(&x + &k2 * (0.5 * h)));
            let k4 = f(&(&x + &k3 * h));
            x += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
            if x.iter().any(|v| !v.is_finite()) {
                overflow = true;
                break 'outer;
            }
        }
        times.push(k as f64 * cfg.dt);
        states.push(x.as_slice().to_vec());
    }

    let equilibrium = a
        .clone()
        .lu()
        .solve(&(-&u))
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .map(|x| x.as_slice().to_vec());

    Ok(Trajectory {
        times,
        states,
        labels: model.labels.clone(),
        equilibrium,
        overflow,
    })
}

/// Trapezoidal `∫ e(t)² dt` over the sampled signal.
pub fn ise(traj: &Trajectory, label: &str) -> Result<f64> {
    let e = traj.signal(label)?;
    Ok(trapezoid_squared(&traj.times, &e))
}

fn trapezoid_squared(times: &[f64], e: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(e.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] * v[0] + v[1] * v[1]))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseMetrics {
    /// ISE of Δω, when the trajectory carries that state
    pub ise_speed: Option<f64>,
    /// ISE of Δδ, when the trajectory carries that state
    pub ise_angle: Option<f64>,
    /// max |signal|
    pub peak_overshoot: f64,
    /// `None` means the signal never stays inside the band.
    pub settling_time: Option<f64>,
}

/// Default settling band as a fraction of the peak deviation.
pub const SETTLE_BAND: f64 = 0.02;
/// Absolute floor on the settling band (p.u.).
pub const SETTLE_FLOOR: f64 = 1e-5;

/// Peak and settling of the selected signal plus speed/angle ISE.
///
/// Settling is measured about the trajectory's equilibrium (zero when none is
/// known) with band `max(settle_band · peak deviation, SETTLE_FLOOR)`.
pub fn response_metrics(traj: &Trajectory, label: &str, settle_band: f64) -> Result<ResponseMetrics> {
    if settle_band.is_nan() || settle_band <= 0.0 {
        return Err(Error::InvalidParameter("settle band must be > 0".to_string()));
    }
    let idx = traj.index_of(label)?;
    let signal: Vec<f64> = traj.states.iter().map(|r| r[idx]).collect();
    let peak = signal.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let reference = traj.equilibrium.as_ref().map_or(0.0, |eq| eq[idx]);
    let deviation: Vec<f64> = signal.iter().map(|v| (v - reference).abs()).collect();
    let peak_dev = deviation.iter().copied().fold(0.0, f64::max);
    let band = (settle_band * peak_dev).max(SETTLE_FLOOR);

    let settling_time = if traj.overflow {
        None
    } else {
        match deviation.iter().rposition(|d| *d > band) {
            None => traj.times.first().copied(),
            Some(last) if last + 1 < traj.times.len() => Some(traj.times[last + 1]),
            Some(_) => None,
        }
    };

    let optional_ise = |name: &str| match traj.index_of(name) {
        Ok(_) => ise(traj, name).map(Some),
        Err(_) => Ok(None),
    };
    Ok(ResponseMetrics {
        ise_speed: optional_ise(D_OMEGA)?,
        ise_angle: optional_ise(D_DELTA)?,
        peak_overshoot: peak,
        settling_time,
    })
}
