//! Experiment drivers: configuration, single runs, viscosity sweeps, the
//! localization experiment and the `check` invariant suite.

mod check;
mod config;
mod no_travel;
mod output;
mod run;
mod sweep;

pub use check::{
    check, invariant_names, parse_overrides, CheckReport, CheckRow, CHECK_MAX_N, OVERRIDE_ENV,
};
pub use config::{
    derived_transient, dissipation_wavenumber, resolution_guard, ExperimentConfig,
    MollifierSection, NoTravelSection, SolverSection, BALL_MARGIN, DECAY_FLOOR,
};
pub use no_travel::{
    cutoff_field, cutoff_phi, no_travel_experiment, y_r, NoTravelResult, CUTOFF_PROFILE,
    MIN_DOMAIN_LENGTH, RADIUS_FRACTIONS,
};
pub use output::fmt_f64;
pub use run::{run_single, simulate, SingleRun};
pub use sweep::{
    laminar_dissipation, sweep_trends, viscosity_sweep, SweepMember, SweepResult, TrendCheck,
    DECREASE_SLACK, DISSIPATION_RATIO,
};
