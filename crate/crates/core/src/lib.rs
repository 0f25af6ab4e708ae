//! Pseudo-spectral solver for the damped and driven 2D Navier-Stokes
//! equations in vorticity form,
//!
//! ```text
//! ∂t ω + u·∇ω − νΔω + γω = g,    u = K ⋆ ω,
//! ```
//!
//! on a periodic square, together with the diagnostics used to study long
//! time averages: energy and enstrophy balances, mollified balances and
//! commutator fluxes, cylindrical test functionals and their stationarity
//! residuals, and drivers for viscosity sweeps.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod mollify;
pub mod par;
pub mod spectral;
pub mod statistics;

pub use error::{Error, Result};
