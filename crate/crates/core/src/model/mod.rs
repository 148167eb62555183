//! Linearized single-machine infinite-bus plant.

mod heffron;
mod params;
mod state_space;

pub use heffron::{compute_heffron_constants, operating_point, HeffronConstants, OperatingPoint};
pub use params::{
    ExcitationParams, GovernorTurbineParams, LineLoadParams, MachineParams, OperatingCondition,
    PssParams, SystemParams,
};
pub use state_space::{
    build_closed_loop, build_open_loop, pss_frequency_response, StateSpaceModel,
    CLOSED_LOOP_LABELS, D_DELTA, D_EFD, D_EQ_PRIME, D_OMEGA, D_P1, D_P2, D_PG, D_TM, D_UE, D_VE,
    D_VR, OPEN_LOOP_LABELS,
};
