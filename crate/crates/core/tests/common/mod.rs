//! Finite-difference linearization of an unreduced SMIB network, shared by
//! the oracle tests and the acceptance suite, plus the closed-form step
//! response of a linear system.

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector, Matrix2, Vector2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::fs;
use std::path::Path;
use std::f64::consts::FRAC_PI_2;

use smib_pss::modal::eigenvalues;
use smib_pss::model::{LineLoadParams, MachineParams, OperatingCondition, StateSpaceModel};
use smib_pss::sim::Trajectory;

type C = Complex<f64>;

pub struct Net {
    xd: f64,
    xdp: f64,
    xq: f64,
    z_e: C,
    y_l: C,
    v_inf: f64,
}

pub struct Outputs {
    pub te: f64,
    pub eq: f64,
    pub vt: f64,
}

impl Net {
    /// Stator currents for rotor angle `delta` (q-axis vs. the infinite bus)
    /// and transient EMF `eqp`, from terminal KCL
    /// `I = Y_L V + (V - V_inf) / Z_e` with `v_d = x_q i_q`, `v_q = E_q' - x_d' i_d`.
    pub fn solve(&self, delta: f64, eqp: f64) -> Outputs {
        let rot = C::from_polar(1.0, delta - FRAC_PI_2);
        let y = self.y_l + 1.0 / self.z_e;
        let rhs = -C::new(self.v_inf, 0.0) / (self.z_e * rot);
        // residual(i_d, i_q) = i_d + j i_q - y (x_q i_q + j (eqp - x_d' i_d)) - rhs
        let res = |id: f64, iq: f64| C::new(id, iq) - y * C::new(self.xq * iq, eqp - self.xdp * id) - rhs;
        let r0 = res(0.0, 0.0);
        let cd = res(1.0, 0.0) - r0;
        let cq = res(0.0, 1.0) - r0;
        let m = Matrix2::new(cd.re, cq.re, cd.im, cq.im);
        let sol = m.lu().solve(&Vector2::new(-r0.re, -r0.im)).expect("regular network");
        let (id, iq) = (sol[0], sol[1]);
        let vd = self.xq * iq;
        let vq = eqp - self.xdp * id;
        Outputs {
            te: eqp * iq + (self.xq - self.xdp) * id * iq,
            eq: eqp + (self.xd - self.xdp) * id,
            vt: vd.hypot(vq),
        }
    }
}

/// Steady state from terminal P, Q and |V_t|, terminal voltage on the real axis.
pub fn steady_state(m: &MachineParams, line: &LineLoadParams, op: &OperatingCondition) -> (Net, f64, f64) {
    let z_e = C::new(line.r, line.x_e * op.x_e_scale);
    let y_l = C::new(line.g, line.b);
    let vt = C::new(line.v_t0, 0.0);
    let i = (C::new(op.p, op.q) / vt).conj();
    let v_inf = vt - z_e * (i - y_l * vt);
    let q_axis = vt + C::new(0.0, m.x_q) * i;
    let idq = i * C::from_polar(1.0, FRAC_PI_2 - q_axis.arg());
    let vdq = vt * C::from_polar(1.0, FRAC_PI_2 - q_axis.arg());
    let eqp = vdq.im + m.x_d_prime * idq.re;
    let delta = q_axis.arg() - v_inf.arg();
    let net = Net {
        xd: m.x_d,
        xdp: m.x_d_prime,
        xq: m.x_q,
        z_e,
        y_l,
        v_inf: v_inf.norm(),
    };
    (net, delta, eqp)
}

/// `[K1..K6]` by central differences with step 1e-6, and the electrical
/// torque at the operating point.
pub fn fd_constants(m: &MachineParams, line: &LineLoadParams, op: &OperatingCondition) -> ([f64; 6], f64) {
    let (net, delta, eqp) = steady_state(m, line, op);
    let h = 1e-6;
    let d_delta = |f: fn(&Outputs) -> f64| (f(&net.solve(delta + h, eqp)) - f(&net.solve(delta - h, eqp))) / (2.0 * h);
    let d_eqp = |f: fn(&Outputs) -> f64| (f(&net.solve(delta, eqp + h)) - f(&net.solve(delta, eqp - h))) / (2.0 * h);
    let k1 = d_delta(|o| o.te);
    let k2 = d_eqp(|o| o.te);
    let k3 = 1.0 / d_eqp(|o| o.eq);
    let k4 = d_delta(|o| o.eq);
    let k5 = d_delta(|o| o.vt);
    let k6 = d_eqp(|o| o.vt);
    let te0 = net.solve(delta, eqp).te;
    ([k1, k2, k3, k4, k5, k6], te0)
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

pub fn scalar_model(a: f64, b: f64) -> StateSpaceModel {
    StateSpaceModel::new(DMatrix::from_element(1, 1, a), DVector::from_element(1, b), labels(1)).unwrap()
}

/// Random `n × n` system shifted so every eigenvalue has real part below
/// -0.2.
pub fn random_stable(rng: &mut ChaCha8Rng, n: usize) -> StateSpaceModel {
    let r = DMatrix::from_fn(n, n, |_, _| rng.random_range(-3.0..3.0));
    let max_re = eigenvalues(&r).unwrap().iter().map(|z| z.re).fold(f64::MIN, f64::max);
    let shift = max_re + rng.random_range(0.2..2.0);
    let a = r - DMatrix::identity(n, n) * shift;
    let b = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    StateSpaceModel::new(a, b, labels(n)).unwrap()
}

/// `A⁻¹ (e^{At} − I) b u`
pub fn closed_form(model: &StateSpaceModel, u: f64, t: f64) -> DVector<f64> {
    let n = model.order();
    let e = (&model.a * t).exp();
    let inv = model.a.clone().try_inverse().unwrap();
    inv * (e - DMatrix::identity(n, n)) * &model.b_dist * u
}

pub fn peak(traj: &Trajectory) -> f64 {
    traj.states.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Every file below `root` with its contents, sorted by relative path.
pub fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}
