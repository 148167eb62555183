//! Modal analysis: eigenvalues, damping ratios and electromechanical mode
//! selection.

mod eigen;

pub use eigen::{eigenvalues, eigenvector, left_eigenvector, participation_factors};

use nalgebra::{Complex, DMatrix};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{StateSpaceModel, D_DELTA, D_OMEGA};

/// Default damping-ratio threshold for electromechanical modes.
pub const ZETA_THRESHOLD: f64 = 0.06;

/// Frequency band (Hz) in which a mode may be electromechanical.
pub const EM_BAND_HZ: (f64, f64) = (0.1, 3.0);

/// Rotor participation above which a mode is electromechanical regardless of
/// the other states.
pub const EM_PARTICIPATION: f64 = 0.2;

/// `-σ / sqrt(σ² + ω²)`
pub fn damping_ratio(sigma: f64, omega: f64) -> Result<f64> {
    if sigma == 0.0 && omega == 0.0 {
        return Err(Error::Domain("damping ratio undefined at the origin".to_string()));
    }
    Ok((-sigma / sigma.hypot(omega)).clamp(-1.0, 1.0))
}

/// One eigenvalue, or the `ω ≥ 0` member of a conjugate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub sigma: f64,
    pub omega: f64,
    pub zeta: f64,
    pub freq_hz: f64,
    pub is_em: bool,
}

impl Mode {
    pub fn from_eigenvalue(lambda: Complex<f64>) -> Self {
        let omega = lambda.im.abs();
        let zeta = if lambda.re == 0.0 && omega == 0.0 {
            // a zero eigenvalue carries no decay information
            0.0
        } else if omega == 0.0 {
            -lambda.re.signum()
        } else {
            -lambda.re / lambda.re.hypot(omega)
        };
        Self {
            sigma: lambda.re,
            omega,
            zeta,
            freq_hz: omega / (2.0 * PI),
            is_em: false,
        }
    }

    pub fn is_complex(&self) -> bool {
        self.omega > 0.0
    }

    pub fn eigenvalue(&self) -> Complex<f64> {
        Complex::new(self.sigma, self.omega)
    }
}

/// Collapses conjugate pairs to their upper-half-plane member.
pub fn modes_from_eigenvalues(values: &[Complex<f64>]) -> Vec<Mode> {
    values
        .iter()
        .filter(|z| z.im >= 0.0)
        .map(|&z| Mode::from_eigenvalue(z))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub modes: Vec<Mode>,
    /// Minimum damping over electromechanical modes, `None` if there are none.
    pub min_em_zeta: Option<f64>,
    pub zeta_threshold: f64,
    /// Participation factors could not be formed for some candidate mode and
    /// the frequency band alone decided it.
    pub band_only_fallback: bool,
}

impl ModeSet {
    pub fn em_modes(&self) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(|m| m.is_em)
    }

    /// Tuning objective: minimum EM damping, or the minimum over all complex
    /// modes when none is electromechanical. A model with no complex modes at
    /// all scores 1.
    pub fn objective(&self) -> f64 {
        self.min_em_zeta.unwrap_or_else(|| {
            self.modes
                .iter()
                .filter(|m| m.is_complex())
                .map(|m| m.zeta)
                .reduce(f64::min)
                .unwrap_or(1.0)
        })
    }

    /// All modes decay: every eigenvalue has a negative real part.
    pub fn is_stable(&self) -> bool {
        self.modes.iter().all(|m| m.sigma < 0.0)
    }

    /// [`objective`](Self::objective) capped by the damping of every mode
    /// that does not decay, so an unstable non-electromechanical mode cannot
    /// hide behind well-damped electromechanical ones.
    pub fn guarded_objective(&self) -> f64 {
        self.modes
            .iter()
            .filter(|m| m.sigma >= 0.0)
            .map(|m| m.zeta)
            .fold(self.objective(), f64::min)
    }

    /// Stable, with objective at or above the threshold.
    pub fn meets_threshold(&self) -> bool {
        self.is_stable() && self.objective() >= self.zeta_threshold
    }
}

fn rotor_dominates(p: &[f64], rotor: (usize, usize)) -> bool {
    let rotor_share = p[rotor.0] + p[rotor.1];
    if rotor_share > EM_PARTICIPATION {
        return true;
    }
    let others: Vec<f64> = p
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != rotor.0 && *i != rotor.1)
        .map(|(_, v)| *v)
        .collect();
    others
        .chunks(2)
        .map(|c| c.iter().sum::<f64>())
        .all(|share| rotor_share > share)
}

/// Flags electromechanical modes: complex, within [`EM_BAND_HZ`], and with
/// rotor speed/angle participation above [`EM_PARTICIPATION`] or above every
/// other consecutive state pair. Returns the modes and whether the band-only
/// fallback was used for a defective eigenvalue.
pub fn classify_em_modes(
    modes: &[Mode],
    a: &DMatrix<f64>,
    labels: &[String],
) -> Result<(Vec<Mode>, bool)> {
    if labels.len() != a.nrows() {
        return Err(Error::Dimension(format!(
            "{} labels for a {}-state matrix",
            labels.len(),
            a.nrows()
        )));
    }
    let find = |name: &str| labels.iter().position(|l| l == name);
    let rotor = match (find(D_OMEGA), find(D_DELTA)) {
        (Some(w), Some(d)) => Some((w, d)),
        _ => None,
    };
    let mut fallback = false;
    let mut out = Vec::with_capacity(modes.len());
    for mode in modes {
        let mut m = *mode;
        let in_band = m.is_complex() && (EM_BAND_HZ.0..=EM_BAND_HZ.1).contains(&m.freq_hz);
        m.is_em = match (in_band, rotor) {
            (false, _) | (true, None) => false,
            (true, Some(rotor)) => match participation_factors(a, m.eigenvalue()) {
                Ok(Some(p)) => rotor_dominates(&p, rotor),
                Ok(None) | Err(Error::Numerical(_)) => {
                    fallback = true;
                    true
                }
                Err(e) => return Err(e),
            },
        };
        out.push(m);
    }
    Ok((out, fallback))
}

/// Eigen-analysis of a model with the default threshold.
pub fn analyze(model: &StateSpaceModel) -> Result<ModeSet> {
    analyze_with_threshold(model, ZETA_THRESHOLD)
}

pub fn analyze_with_threshold(model: &StateSpaceModel, zeta_threshold: f64) -> Result<ModeSet> {
    let values = eigenvalues(&model.a)?;
    let modes = modes_from_eigenvalues(&values);
    let (modes, band_only_fallback) = classify_em_modes(&modes, &model.a, &model.labels)?;
    let min_em_zeta = modes.iter().filter(|m| m.is_em).map(|m| m.zeta).reduce(f64::min);
    Ok(ModeSet {
        modes,
        min_em_zeta,
        zeta_threshold,
        band_only_fallback,
    })
}

/// Minimum electromechanical damping ratio of the model.
pub fn objective_j(model: &StateSpaceModel) -> Result<f64> {
    Ok(analyze(model)?.objective())
}

/// [`objective_j`] capped by the damping of any non-decaying mode.
pub fn guarded_objective_j(model: &StateSpaceModel) -> Result<f64> {
    Ok(analyze(model)?.guarded_objective())
}
