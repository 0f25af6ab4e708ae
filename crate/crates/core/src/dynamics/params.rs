use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and numerical parameters of one trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Viscosity `ν ≥ 0`.
    pub nu: f64,
    /// Linear damping `γ > 0`.
    pub gamma: f64,
    pub dt: f64,
    /// Transient cutoff before averaging starts.
    #[serde(default)]
    pub t0: f64,
    /// Averaging window `T`.
    pub horizon: f64,
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return bad("nu must be finite and >= 0");
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return bad("gamma must be > 0");
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt must be > 0");
        }
        if !(self.t0.is_finite() && self.t0 >= 0.0) {
            return bad("t0 must be >= 0");
        }
        if !(self.horizon.is_finite() && self.horizon >= 0.0) {
            return bad("horizon must be >= 0");
        }
        Ok(())
    }

    /// Number of steps needed to reach `t0 + horizon`.
    pub fn total_steps(&self) -> u64 {
        ((self.t0 + self.horizon) / self.dt).round() as u64
    }

    /// Step index at which averaging starts.
    pub fn start_step(&self) -> u64 {
        (self.t0 / self.dt).round() as u64
    }

    /// Linear decay rate `γ + ν|k|²` of a mode.
    #[inline]
    pub fn linear_rate(&self, k_sq: f64) -> f64 {
        self.gamma + self.nu * k_sq
    }
}

/// Largest stable step under the advective CFL estimate `dt ≤ 0.5 h / max|u|`.
pub fn cfl_limit(spacing: f64, max_speed: f64) -> f64 {
    if max_speed > 0.0 {
        0.5 * spacing / max_speed
    } else {
        f64::INFINITY
    }
}
