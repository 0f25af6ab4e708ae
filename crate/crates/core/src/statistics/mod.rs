//! Time-averaged statistics of long trajectories: test functionals, their
//! stationarity residuals, shell balances and support radii.

mod accumulator;
mod functional;
mod observer;
mod report;

pub use accumulator::AverageAccumulator;
pub use functional::{
    catalog_functional, eval_psi, eval_psi_prime, f1, f2, f3, low_harmonic_basis, FunctionalKind,
    FunctionalRates, OuterFunction, TestFunctional, CATALOG_FIELDS, CATALOG_NAMES,
};
pub use observer::{
    psi_channel, rate_channel, term_scale_channel, SeriesRow, Shell, StatisticsObserver, BALANCE,
    ENERGY, ENSTROPHY, INJECTION, L1, L2, LINF, PALINSTROPHY,
};
pub use report::{
    measure_report, shell_balance, stationarity_residual, GineqCheck, MeasureReport, ShellBalance,
    StationarityResidual, SupportRadii,
};

/// `‖g‖₂/γ`, the radius of the absorbing ball in `L²`.
pub fn support_ball_radius(g_l2: f64, gamma: f64) -> f64 {
    g_l2 / gamma
}
