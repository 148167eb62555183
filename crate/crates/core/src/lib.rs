//! Small-signal analysis and stabilizer tuning for a single machine connected
//! to an infinite bus, with IEEE Type 1 excitation and a non-reheat steam
//! governor-turbine.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: Heffron-Phillips constants and open/closed-loop state matrices.
//! - [`modal`]: eigenvalues, damping ratios, electromechanical mode selection
//!   and the tuning objective.
//! - [`optim`]: real-coded genetic algorithm and particle swarm optimizer.
//! - [`sim`]: step-disturbance simulation and time-domain metrics.
//! - [`scenario`]: configuration files, the study pipeline and table output.

pub mod error;
pub mod modal;
pub mod model;
pub mod optim;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
