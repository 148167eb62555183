use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(what.to_string()))
    }
}

/// Synchronous machine constants, per unit on machine base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MachineParams {
    /// d-axis synchronous reactance
    pub x_d: f64,
    /// d-axis transient reactance
    pub x_d_prime: f64,
    /// q-axis reactance
    pub x_q: f64,
    /// inertia constant M = 2H (s)
    pub m: f64,
    /// damping coefficient
    pub d: f64,
    /// field open-circuit time constant (s)
    pub t_do_prime: f64,
    /// synchronous speed (rad/s)
    pub omega_0: f64,
}

impl Default for MachineParams {
    fn default() -> Self {
        Self {
            x_d: 0.973,
            x_d_prime: 0.190,
            x_q: 0.550,
            m: 9.26,
            d: 0.0,
            t_do_prime: 7.76,
            omega_0: 2.0 * PI * 60.0,
        }
    }
}

impl MachineParams {
    pub fn validate(&self) -> Result<()> {
        check(self.x_d_prime > 0.0, "machine: x_d_prime must be > 0")?;
        check(self.x_d > self.x_d_prime, "machine: x_d must exceed x_d_prime")?;
        check(self.x_q > 0.0, "machine: x_q must be > 0")?;
        check(self.m > 0.0, "machine: m must be > 0")?;
        check(self.d >= 0.0, "machine: d must be >= 0")?;
        check(self.t_do_prime > 0.0, "machine: t_do_prime must be > 0")?;
        check(self.omega_0 > 0.0, "machine: omega_0 must be > 0")?;
        check(
            [self.x_d, self.x_d_prime, self.x_q, self.m, self.d, self.t_do_prime, self.omega_0]
                .iter()
                .all(|v| v.is_finite()),
            "machine: all constants must be finite",
        )
    }
}

/// Transmission line and local load at the machine terminal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineLoadParams {
    pub r: f64,
    pub x_e: f64,
    /// local load conductance
    pub g: f64,
    /// local load susceptance
    pub b: f64,
    /// terminal voltage magnitude at the operating point
    pub v_t0: f64,
}

impl Default for LineLoadParams {
    fn default() -> Self {
        Self {
            r: 0.034,
            x_e: 0.997,
            g: 0.249,
            b: 0.262,
            v_t0: 1.05,
        }
    }
}

impl LineLoadParams {
    pub fn validate(&self) -> Result<()> {
        check(self.x_e > 0.0, "line: x_e must be > 0")?;
        check(self.v_t0 > 0.0, "line: v_t0 must be > 0")?;
        check(
            [self.r, self.x_e, self.g, self.b, self.v_t0].iter().all(|v| v.is_finite()),
            "line: all constants must be finite",
        )
    }
}

/// IEEE Type 1 excitation system with rate feedback.
///
/// The defaults are a well-posed set of typical constants; the amplifier gain
/// is the only value taken from the test system data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExcitationParams {
    pub k_a: f64,
    pub t_a: f64,
    pub k_e: f64,
    pub t_e: f64,
    pub k_f: f64,
    pub t_f: f64,
    /// saturation, held constant
    pub s_e: f64,
}

impl Default for ExcitationParams {
    fn default() -> Self {
        Self {
            k_a: 190.0,
            t_a: 0.025,
            k_e: 0.025,
            t_e: 0.04,
            k_f: 0.0017,
            t_f: 0.045,
            s_e: 0.0,
        }
    }
}

impl ExcitationParams {
    pub fn validate(&self) -> Result<()> {
        check(self.k_a > 0.0, "excitation: k_a must be > 0")?;
        check(self.t_a > 0.0, "excitation: t_a must be > 0")?;
        check(self.t_e > 0.0, "excitation: t_e must be > 0")?;
        check(self.t_f > 0.0, "excitation: t_f must be > 0")?;
        check(self.k_f >= 0.0, "excitation: k_f must be >= 0")?;
        check(
            [self.k_a, self.t_a, self.k_e, self.t_e, self.k_f, self.t_f, self.s_e]
                .iter()
                .all(|v| v.is_finite()),
            "excitation: all constants must be finite",
        )
    }
}

/// Steam governor and non-reheat turbine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GovernorTurbineParams {
    pub t_gs: f64,
    pub t_ts: f64,
    /// speed droop; `inf` disconnects the speed input
    pub r_p: f64,
    /// accepted for completeness, not used by the linear model
    pub r_t: f64,
    /// reference torque change, not used by the linear model
    pub delta_t_ref: f64,
}

impl Default for GovernorTurbineParams {
    fn default() -> Self {
        Self {
            t_gs: 0.2,
            t_ts: 0.3,
            r_p: 0.05,
            r_t: 0.4,
            delta_t_ref: 0.0,
        }
    }
}

impl GovernorTurbineParams {
    pub fn validate(&self) -> Result<()> {
        check(self.t_gs > 0.0 && self.t_gs.is_finite(), "governor: t_gs must be > 0")?;
        check(self.t_ts > 0.0 && self.t_ts.is_finite(), "governor: t_ts must be > 0")?;
        check(self.r_p > 0.0, "governor: r_p must be > 0")
    }
}

/// Full set of plant constants.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    pub machine: MachineParams,
    pub line: LineLoadParams,
    pub excitation: ExcitationParams,
    pub governor: GovernorTurbineParams,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        self.machine.validate()?;
        self.line.validate()?;
        self.excitation.validate()?;
        self.governor.validate()
    }
}

/// One loading / disturbance / parameter-perturbation case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingCondition {
    pub p: f64,
    pub q: f64,
    pub delta_p_l: f64,
    pub x_e_scale: f64,
    pub k_a_scale: f64,
}

impl OperatingCondition {
    pub fn new(p: f64, q: f64, delta_p_l: f64) -> Self {
        Self {
            p,
            q,
            delta_p_l,
            x_e_scale: 1.0,
            k_a_scale: 1.0,
        }
    }

    pub fn with_x_e_scale(mut self, scale: f64) -> Self {
        self.x_e_scale = scale;
        self
    }

    pub fn with_k_a_scale(mut self, scale: f64) -> Self {
        self.k_a_scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check(self.p > 0.0 && self.p.is_finite(), "operating condition: p must be > 0")?;
        check(self.q.is_finite(), "operating condition: q must be finite")?;
        check(self.delta_p_l.is_finite(), "operating condition: delta_p_l must be finite")?;
        check(
            self.x_e_scale > 0.0 && self.x_e_scale.is_finite(),
            "operating condition: x_e_scale must be > 0",
        )?;
        check(
            self.k_a_scale > 0.0 && self.k_a_scale.is_finite(),
            "operating condition: k_a_scale must be > 0",
        )
    }
}

/// Stabilizer gain, lead-lag pair and washout.
///
/// Both lead-lag stages share `(t1, t2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PssParams {
    pub k_s: f64,
    pub t1: f64,
    pub t2: f64,
    pub t_w: f64,
}

impl PssParams {
    pub const DEFAULT_WASHOUT: f64 = 10.0;
    /// Lower limits of the tuned vector `[k_s, t1, t2]`.
    pub const LOWER: [f64; 3] = [5.0, 0.1, 0.1];
    /// Upper limits of the tuned vector `[k_s, t1, t2]`.
    pub const UPPER: [f64; 3] = [60.0, 1.0, 1.0];

    pub fn new(k_s: f64, t1: f64, t2: f64) -> Self {
        Self {
            k_s,
            t1,
            t2,
            t_w: Self::DEFAULT_WASHOUT,
        }
    }

    pub fn with_washout(mut self, t_w: f64) -> Self {
        self.t_w = t_w;
        self
    }

    /// Builds from a decision vector `[k_s, t1, t2]`.
    pub fn from_vector(x: &[f64], t_w: f64) -> Result<Self> {
        match x {
            [k_s, t1, t2] => Ok(Self {
                k_s: *k_s,
                t1: *t1,
                t2: *t2,
                t_w,
            }),
            _ => Err(Error::Dimension(format!(
                "stabilizer vector needs 3 entries, got {}",
                x.len()
            ))),
        }
    }

    pub fn to_vector(&self) -> [f64; 3] {
        [self.k_s, self.t1, self.t2]
    }

    pub fn within_bounds(&self) -> bool {
        self.to_vector()
            .iter()
            .zip(Self::LOWER.iter().zip(Self::UPPER.iter()))
            .all(|(v, (lo, hi))| (lo..=hi).contains(&v))
    }

    /// Structural checks needed to realize the stabilizer as a state-space block.
    pub fn validate(&self) -> Result<()> {
        check(self.t2 > 0.0, "stabilizer: t2 must be > 0")?;
        check(self.t_w > 0.0, "stabilizer: t_w must be > 0")?;
        check(
            [self.k_s, self.t1, self.t2, self.t_w].iter().all(|v| v.is_finite()),
            "stabilizer: parameters must be finite",
        )
    }
}
