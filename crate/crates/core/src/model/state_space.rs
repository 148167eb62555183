use nalgebra::{Complex, DMatrix, DVector};

use super::heffron::{compute_heffron_constants, HeffronConstants};
use super::params::{
    ExcitationParams, GovernorTurbineParams, LineLoadParams, MachineParams, OperatingCondition,
    PssParams, SystemParams,
};
use crate::error::{Error, Result};

pub const D_OMEGA: &str = "d_omega";
pub const D_DELTA: &str = "d_delta";
pub const D_EQ_PRIME: &str = "d_eq_prime";
pub const D_EFD: &str = "d_efd";
pub const D_VR: &str = "d_vr";
pub const D_VE: &str = "d_ve";
pub const D_PG: &str = "d_pg";
pub const D_TM: &str = "d_tm";
pub const D_P1: &str = "d_p1";
pub const D_P2: &str = "d_p2";
pub const D_UE: &str = "d_ue";

/// State ordering of the open-loop model.
pub const OPEN_LOOP_LABELS: [&str; 8] = [D_OMEGA, D_DELTA, D_EQ_PRIME, D_EFD, D_VR, D_VE, D_PG, D_TM];

/// State ordering of the model with stabilizer.
pub const CLOSED_LOOP_LABELS: [&str; 11] = [
    D_OMEGA, D_DELTA, D_EQ_PRIME, D_EFD, D_VR, D_VE, D_PG, D_TM, D_P1, D_P2, D_UE,
];

// row/column indices
const W: usize = 0;
const DELTA: usize = 1;
const EQ: usize = 2;
const EFD: usize = 3;
const VR: usize = 4;
const VE: usize = 5;
const PG: usize = 6;
const TM: usize = 7;
const P1: usize = 8;
const P2: usize = 9;
const UE: usize = 10;

/// `dx/dt = A x + b_dist ΔP_L`
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    pub a: DMatrix<f64>,
    pub b_dist: DVector<f64>,
    pub labels: Vec<String>,
}

impl StateSpaceModel {
    pub fn new(a: DMatrix<f64>, b_dist: DVector<f64>, labels: Vec<String>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b_dist.len() != n || labels.len() != n {
            return Err(Error::Dimension(format!(
                "A is {}x{}, b_dist has {} rows, {} labels",
                a.nrows(),
                a.ncols(),
                b_dist.len(),
                labels.len()
            )));
        }
        if a.iter().chain(b_dist.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Numerical("state-space model has non-finite entries".to_string()));
        }
        Ok(Self { a, b_dist, labels })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Fills the 8x8 plant block. `k_a` is already scaled.
fn fill_plant(
    a: &mut DMatrix<f64>,
    b: &mut DVector<f64>,
    machine: &MachineParams,
    exc: &ExcitationParams,
    k_a: f64,
    gt: &GovernorTurbineParams,
    k: &HeffronConstants,
) {
    let m = machine.m;
    // swing: M dω/dt = ΔT_m - K1 Δδ - K2 ΔE_q' - D Δω - ΔP_L
    a[(W, W)] = -machine.d / m;
    a[(W, DELTA)] = -k.k1 / m;
    a[(W, EQ)] = -k.k2 / m;
    a[(W, TM)] = 1.0 / m;
    b[W] = -1.0 / m;

    a[(DELTA, W)] = machine.omega_0;

    // field: T_do' dE_q'/dt = ΔE_FD - ΔE_q'/K3 - K4 Δδ
    let tdo = machine.t_do_prime;
    a[(EQ, DELTA)] = -k.k4 / tdo;
    a[(EQ, EQ)] = -1.0 / (k.k3 * tdo);
    a[(EQ, EFD)] = 1.0 / tdo;

    // exciter: T_E dE_FD/dt = ΔV_R - (K_E + S_E) ΔE_FD
    let ke = exc.k_e + exc.s_e;
    a[(EFD, EFD)] = -ke / exc.t_e;
    a[(EFD, VR)] = 1.0 / exc.t_e;

    // amplifier: T_A dV_R/dt = -ΔV_R + K_A (-ΔV_t - ΔV_E + ΔU_E), ΔV_t = K5 Δδ + K6 ΔE_q'
    a[(VR, DELTA)] = -k_a * k.k5 / exc.t_a;
    a[(VR, EQ)] = -k_a * k.k6 / exc.t_a;
    a[(VR, VR)] = -1.0 / exc.t_a;
    a[(VR, VE)] = -k_a / exc.t_a;

    // rate feedback: T_F dV_E/dt = -ΔV_E + K_F dE_FD/dt
    let kf = exc.k_f / (exc.t_e * exc.t_f);
    a[(VE, EFD)] = -kf * ke;
    a[(VE, VR)] = kf;
    a[(VE, VE)] = -1.0 / exc.t_f;

    // governor: T_GS dP_G/dt = -ΔP_G - Δω / R_p
    a[(PG, W)] = -1.0 / (gt.r_p * gt.t_gs);
    a[(PG, PG)] = -1.0 / gt.t_gs;

    // turbine: T_TS dT_m/dt = ΔP_G - ΔT_m
    a[(TM, PG)] = 1.0 / gt.t_ts;
    a[(TM, TM)] = -1.0 / gt.t_ts;
}

fn validate_plant(machine: &MachineParams, exc: &ExcitationParams, gt: &GovernorTurbineParams) -> Result<()> {
    machine.validate()?;
    exc.validate()?;
    gt.validate()
}

/// Eight-state model without stabilizer.
pub fn build_open_loop(
    machine: &MachineParams,
    line: &LineLoadParams,
    exc: &ExcitationParams,
    gt: &GovernorTurbineParams,
    op: &OperatingCondition,
) -> Result<StateSpaceModel> {
    validate_plant(machine, exc, gt)?;
    let k = compute_heffron_constants(machine, line, op)?;
    let mut a = DMatrix::zeros(8, 8);
    let mut b = DVector::zeros(8);
    fill_plant(&mut a, &mut b, machine, exc, exc.k_a * op.k_a_scale, gt, &k);
    StateSpaceModel::new(a, b, labels(&OPEN_LOOP_LABELS))
}

/// Eleven-state model with the stabilizer output added at the voltage
/// regulator summing junction.
///
/// Each stabilizer block output is a state. The washout needs dΔω/dt and each
/// lead-lag stage needs the derivative of its input, so those rows are formed
/// by substituting the upstream rows (including their disturbance entries).
pub fn build_closed_loop(
    machine: &MachineParams,
    line: &LineLoadParams,
    exc: &ExcitationParams,
    gt: &GovernorTurbineParams,
    pss: &PssParams,
    op: &OperatingCondition,
) -> Result<StateSpaceModel> {
    validate_plant(machine, exc, gt)?;
    pss.validate()?;
    let k = compute_heffron_constants(machine, line, op)?;
    let k_a = exc.k_a * op.k_a_scale;

    let mut a = DMatrix::zeros(11, 11);
    let mut b = DVector::zeros(11);
    fill_plant(&mut a, &mut b, machine, exc, k_a, gt, &k);
    a[(VR, UE)] = k_a / exc.t_a;

    // washout: dΔP1/dt = K_s dΔω/dt - ΔP1/T_w
    for j in 0..11 {
        a[(P1, j)] = pss.k_s * a[(W, j)];
    }
    a[(P1, P1)] -= 1.0 / pss.t_w;
    b[P1] = pss.k_s * b[W];

    // lead-lag: T2 dy/dt = u + T1 du/dt - y
    let ratio = pss.t1 / pss.t2;
    for (input, output) in [(P1, P2), (P2, UE)] {
        for j in 0..11 {
            a[(output, j)] = ratio * a[(input, j)];
        }
        a[(output, input)] += 1.0 / pss.t2;
        a[(output, output)] -= 1.0 / pss.t2;
        b[output] = ratio * b[input];
    }

    StateSpaceModel::new(a, b, labels(&CLOSED_LOOP_LABELS))
}

/// Convenience wrappers over a [`SystemParams`] bundle.
impl SystemParams {
    pub fn heffron_constants(&self, op: &OperatingCondition) -> Result<HeffronConstants> {
        compute_heffron_constants(&self.machine, &self.line, op)
    }

    pub fn open_loop(&self, op: &OperatingCondition) -> Result<StateSpaceModel> {
        build_open_loop(&self.machine, &self.line, &self.excitation, &self.governor, op)
    }

    pub fn closed_loop(&self, pss: &PssParams, op: &OperatingCondition) -> Result<StateSpaceModel> {
        build_closed_loop(&self.machine, &self.line, &self.excitation, &self.governor, pss, op)
    }
}

/// `K_s [(1 + jωT1)/(1 + jωT2)]^2 · jωT_w/(1 + jωT_w)`
pub fn pss_frequency_response(pss: &PssParams, omega: f64) -> Complex<f64> {
    let s = Complex::new(0.0, omega);
    let one = Complex::new(1.0, 0.0);
    let lead_lag = (one + s * pss.t1) / (one + s * pss.t2);
    let washout = s * pss.t_w / (one + s * pss.t_w);
    lead_lag * lead_lag * washout * pss.k_s
}
