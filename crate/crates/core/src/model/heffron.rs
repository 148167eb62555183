//! Heffron-Phillips linearization constants.
//!
//! The line `R + jX_e` and the local load `G + jB` are reduced to a Thevenin
//! source `V_s∠β` behind `R_th + jX_th` as seen from the machine terminal. In
//! machine d-q coordinates, with `δ' = δ - β`,
//!
//! ```text
//! v_d = x_q i_q            = V_s sin δ' + R_th i_d - X_th i_q
//! v_q = E_q' - x_d' i_d    = V_s cos δ' + R_th i_q + X_th i_d
//! ```
//!
//! which is linear in `(i_d, i_q)` and gives closed-form partial derivatives.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::params::{LineLoadParams, MachineParams, OperatingCondition};
use crate::error::{Error, Result};

type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeffronConstants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
}

impl HeffronConstants {
    pub fn as_array(&self) -> [f64; 6] {
        [self.k1, self.k2, self.k3, self.k4, self.k5, self.k6]
    }
}

/// Steady-state quantities at the linearization point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// rotor angle w.r.t. the infinite bus (rad)
    pub delta: f64,
    pub e_q_prime: f64,
    pub i_d: f64,
    pub i_q: f64,
    pub v_d: f64,
    pub v_q: f64,
    /// infinite-bus voltage magnitude implied by the terminal conditions
    pub v_inf: f64,
}

/// Thevenin equivalent of line plus local load seen from the terminal, with
/// the infinite bus as angle reference.
struct Network {
    v_s: f64,
    beta: f64,
    r_th: f64,
    x_th: f64,
}

fn reduce_network(line: &LineLoadParams, x_e: f64, v_inf: C64) -> Result<Network> {
    let z_e = C64::new(line.r, x_e);
    let y_l = C64::new(line.g, line.b);
    let k = C64::new(1.0, 0.0) + z_e * y_l;
    if k.norm() < 1e-12 {
        return Err(Error::Domain(
            "network reduction 1 + Z_e*Y_L is singular".to_string(),
        ));
    }
    let v_th = v_inf / k;
    let z_th = z_e / k;
    Ok(Network {
        v_s: v_th.norm(),
        // angle of V_th relative to the infinite bus
        beta: (v_th / v_inf).arg(),
        r_th: z_th.re,
        x_th: z_th.im,
    })
}

/// Solves the steady state from terminal power and voltage.
pub fn operating_point(
    machine: &MachineParams,
    line: &LineLoadParams,
    op: &OperatingCondition,
) -> Result<OperatingPoint> {
    let (point, _) = solve_operating_point(machine, line, op)?;
    Ok(point)
}

fn solve_operating_point(
    machine: &MachineParams,
    line: &LineLoadParams,
    op: &OperatingCondition,
) -> Result<(OperatingPoint, Network)> {
    let x_e = line.x_e * op.x_e_scale;
    let v_t = C64::new(line.v_t0, 0.0);
    let i_gen = C64::new(op.p, -op.q) / v_t.conj();
    let i_line = i_gen - C64::new(line.g, line.b) * v_t;
    let v_inf = v_t - C64::new(line.r, x_e) * i_line;
    if !(v_inf.norm().is_finite() && v_inf.norm() > 1e-6) {
        return Err(Error::Domain(format!(
            "no power-flow solution: infinite-bus voltage V_inf = V_t - Z_e*I_line collapses (|V_inf| = {:.3e})",
            v_inf.norm()
        )));
    }

    // q-axis lies along E_Q = V_t + j x_q I
    let e_qaxis = v_t + C64::new(0.0, machine.x_q) * i_gen;
    if e_qaxis.norm() < 1e-9 {
        return Err(Error::Domain(
            "no power-flow solution: E_Q = V_t + j*x_q*I vanishes, rotor angle undefined".to_string(),
        ));
    }
    let theta = e_qaxis.arg();
    let to_dq = C64::new(0.0, 1.0) * C64::from_polar(1.0, -theta);
    let i_dq = i_gen * to_dq;
    let v_dq = v_t * to_dq;
    let e_q_prime = v_dq.im + machine.x_d_prime * i_dq.re;

    let net = reduce_network(line, x_e, v_inf)?;
    let delta = theta - v_inf.arg();
    let point = OperatingPoint {
        delta,
        e_q_prime,
        i_d: i_dq.re,
        i_q: i_dq.im,
        v_d: v_dq.re,
        v_q: v_dq.im,
        v_inf: v_inf.norm(),
    };
    Ok((point, net))
}

/// Linearization constants about the operating point defined by
/// `(op.p, op.q, line.v_t0)`, with the line reactance scaled by `op.x_e_scale`.
pub fn compute_heffron_constants(
    machine: &MachineParams,
    line: &LineLoadParams,
    op: &OperatingCondition,
) -> Result<HeffronConstants> {
    machine.validate()?;
    line.validate()?;
    op.validate()?;
    let (pt, net) = solve_operating_point(machine, line, op)?;

    let (xq, xdp, xd) = (machine.x_q, machine.x_d_prime, machine.x_d);
    let (r, x) = (net.r_th, net.x_th);
    let det = r * r + (x + xq) * (x + xdp);
    if det.is_nan() || det <= 1e-12 {
        return Err(Error::Domain(format!(
            "no power-flow solution: network determinant R^2 + (X+x_q)(X+x_d') = {det:.3e} is not positive"
        )));
    }
    let (s, c) = (pt.delta - net.beta).sin_cos();
    let vs = net.v_s;

    let did_ddelta = ((x + xq) * vs * s - r * vs * c) / det;
    let did_de = (x + xq) / det;
    let diq_ddelta = (r * vs * s + (x + xdp) * vs * c) / det;
    let diq_de = r / det;

    // T_e = E_q' i_q + (x_q - x_d') i_d i_q
    let flux = pt.e_q_prime + (xq - xdp) * pt.i_d;
    let k1 = flux * diq_ddelta + (xq - xdp) * pt.i_q * did_ddelta;
    let k2 = pt.i_q + flux * diq_de + (xq - xdp) * pt.i_q * did_de;

    // E_q = E_q' + (x_d - x_d') i_d drives the field equation
    let inv_k3 = 1.0 + (xd - xdp) * did_de;
    if inv_k3.is_nan() || inv_k3 <= 0.0 {
        return Err(Error::Domain(format!(
            "field equation ill-posed: 1/K3 = {inv_k3:.3e} is not positive"
        )));
    }
    let k3 = 1.0 / inv_k3;
    let k4 = (xd - xdp) * did_ddelta;

    // V_t^2 = v_d^2 + v_q^2 with v_d = x_q i_q, v_q = E_q' - x_d' i_d
    let vt = pt.v_d.hypot(pt.v_q);
    let k5 = (pt.v_d / vt) * xq * diq_ddelta - (pt.v_q / vt) * xdp * did_ddelta;
    let k6 = (pt.v_d / vt) * xq * diq_de + (pt.v_q / vt) * (1.0 - xdp * did_de);

    let k = HeffronConstants { k1, k2, k3, k4, k5, k6 };
    if k.as_array().iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite linearization constant".to_string()));
    }
    Ok(k)
}
