//! Time integration of the damped and driven vorticity equation and
//! balance diagnostics.

mod diagnostics;
mod forcing;
pub mod initial;
mod params;
mod solver;

pub use diagnostics::{
    decay_envelope_check, energy_balance_residual, enstrophy_balance_residual, envelope_bound,
    steady_state_residual, BalanceRecorder, BalanceSample, EnvelopeNorm, EnvelopeReport,
    EnvelopeViolation, SteadyResidual, L2_ENVELOPE_SLACK, LINF_ENVELOPE_SLACK,
};
pub use forcing::{bump, min_image, periodic_distance, Forcing, ForcingSpec};
pub use initial::InitialSpec;
pub use params::{cfl_limit, SolverParams};
pub use solver::{
    integrate, nonlinear_term, step, vorticity, Integrator, Observer, TrajectoryState,
    BLOW_UP_MAGNITUDE,
};
