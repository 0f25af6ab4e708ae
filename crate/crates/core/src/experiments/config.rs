//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{Forcing, ForcingSpec, InitialSpec, SolverParams};
use crate::error::{Error, Result};
use crate::mollify::{MollifierKernel, RenormalizerBeta};
use crate::spectral::{GridSpec, SpectralField};
use crate::statistics::{catalog_functional, Shell, TestFunctional};

/// Solver section; `t0` is derived from the decay envelope when omitted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub nu: f64,
    pub gamma: f64,
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    pub horizon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierSection {
    /// Widths `ε` used by the `_eps` functionals; the first one is used.
    pub epsilon: Vec<f64>,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

fn default_beta() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoTravelSection {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    0.05
}

impl Default for NoTravelSection {
    fn default() -> Self {
        NoTravelSection {
            threshold: default_threshold(),
        }
    }
}

/// One experiment, as read from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub solver: SolverSection,
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    #[serde(default = "default_stride")]
    pub observer_stride: u64,
    #[serde(default)]
    pub functionals: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mollifier: Option<MollifierSection>,
    #[serde(default)]
    pub shells: Vec<Shell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub no_travel: Option<NoTravelSection>,
}

fn default_outputs() -> PathBuf {
    PathBuf::from("outputs")
}

fn default_stride() -> u64 {
    10
}

/// Margin of the support-ball entry criterion: `‖ω(t₀)‖ ≤ (1 + 1e-2)‖g‖/γ`.
pub const BALL_MARGIN: f64 = 1e-2;
/// With no forcing the ball is `{0}`; the transient then lasts until the
/// envelope has fallen by this factor.
pub const DECAY_FLOOR: f64 = 1e-6;

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Static checks that need no simulation.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        self.grid.validate()?;
        self.params(self.solver.nu, 0.0)?;
        if self.observer_stride == 0 {
            return cfg_err("observer_stride must be >= 1".into());
        }
        if let Some(nus) = &self.sweep {
            if nus.is_empty() {
                return cfg_err("sweep list is empty".into());
            }
            if nus.iter().any(|nu| !(nu.is_finite() && *nu > 0.0)) {
                return cfg_err("sweep viscosities must be positive".into());
            }
            if nus.windows(2).any(|w| w[1] >= w[0]) {
                return cfg_err("sweep viscosities must be strictly decreasing".into());
            }
        }
        if let Some(m) = &self.mollifier {
            if m.epsilon.is_empty() {
                return cfg_err("mollifier.epsilon is empty".into());
            }
            RenormalizerBeta::new(m.beta)?;
            for &eps in &m.epsilon {
                MollifierKernel::new(self.grid, eps)?;
            }
        }
        for s in &self.shells {
            if !(s.lower >= 0.0 && s.upper >= s.lower) {
                return cfg_err(format!(
                    "shell [{}, {}] is not an interval",
                    s.lower, s.upper
                ));
            }
        }
        if self.workers == Some(0) {
            return cfg_err("workers must be >= 1".into());
        }
        self.functionals()?;
        Ok(())
    }

    /// Solver parameters for viscosity `nu` with transient `t0`, both
    /// rounded up to whole observer strides so that samples land on `t₀`
    /// and `t₀ + T`.
    pub fn params(&self, nu: f64, t0: f64) -> Result<SolverParams> {
        let s = &self.solver;
        let quantum = s.dt * self.observer_stride.max(1) as f64;
        let round_up = |t: f64| (t / quantum - 1e-9).ceil().max(0.0) * quantum;
        let p = SolverParams {
            nu,
            gamma: s.gamma,
            dt: s.dt,
            t0: round_up(t0),
            horizon: round_up(s.horizon),
        };
        p.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(p)
    }

    pub fn forcing(&self) -> Result<Forcing> {
        self.forcing.build(&self.grid)
    }

    pub fn initial(&self) -> Result<SpectralField> {
        let mut w = self.initial.build(&self.grid, self.seed)?;
        w.remove_mean();
        Ok(w)
    }

    pub fn functionals(&self) -> Result<Vec<TestFunctional>> {
        let eps = match &self.mollifier {
            Some(m) => Some((
                MollifierKernel::new(self.grid, m.epsilon[0])?,
                RenormalizerBeta::new(m.beta)?,
            )),
            None => None,
        };
        self.functionals
            .iter()
            .map(|name| catalog_functional(name, self.grid, eps.as_ref().map(|(k, b)| (k, b))))
            .collect()
    }

    /// The viscosities to run: the sweep list, or the solver's own `ν`.
    pub fn viscosities(&self) -> Vec<f64> {
        self.sweep.clone().unwrap_or_else(|| vec![self.solver.nu])
    }
}

/// Transient after which the `L²` envelope has entered the ball of radius
/// `(1 + BALL_MARGIN)·‖g‖/γ`:
/// `t₀ = (1/γ) ln max(1, (‖ω₀‖ − G)/max(BALL_MARGIN·G, DECAY_FLOOR·‖ω₀‖))`
/// with `G = ‖g‖/γ`.
pub fn derived_transient(omega0_l2: f64, g_l2: f64, gamma: f64) -> f64 {
    let ball = g_l2 / gamma;
    let excess = omega0_l2 - ball;
    let room = (BALL_MARGIN * ball).max(DECAY_FLOOR * omega0_l2);
    if excess <= 0.0 || room <= 0.0 {
        return 0.0;
    }
    (excess / room).ln().max(0.0) / gamma
}

/// Estimated dissipation wavenumber `(η/ν³)^{1/6}` with the enstrophy
/// injection rate per unit area bounded by `η ≤ ‖g‖²/(γL²)`.
pub fn dissipation_wavenumber(nu: f64, g_l2: f64, gamma: f64, area: f64) -> f64 {
    let eta = g_l2 * g_l2 / (gamma * area);
    if eta == 0.0 {
        return 0.0;
    }
    if nu == 0.0 {
        return f64::INFINITY;
    }
    (eta / nu.powi(3)).powf(1.0 / 6.0)
}

/// Reject `nu` when its dissipation wavenumber exceeds the dealias cutoff.
pub fn resolution_guard(grid: &GridSpec, nu: f64, g_l2: f64, gamma: f64) -> Result<()> {
    let k_diss = dissipation_wavenumber(nu, g_l2, gamma, grid.area());
    let cutoff = grid.cutoff_wavenumber();
    if k_diss <= cutoff {
        return Ok(());
    }
    if !k_diss.is_finite() {
        return Err(Error::Config(format!(
            "nu = {nu} with nonzero forcing has no dissipation scale to resolve"
        )));
    }
    // cutoff = floor(frac·N/2)·unit; smallest even N that reaches k_diss
    let per_unit = (k_diss / grid.wavenumber_unit()).ceil();
    let mut required_n = (2.0 * per_unit / grid.dealias_fraction).ceil() as usize;
    required_n += required_n % 2;
    let cutoff_at = |n: usize| {
        GridSpec {
            points_per_side: n,
            ..*grid
        }
        .cutoff_wavenumber()
    };
    while cutoff_at(required_n) < k_diss {
        required_n += 2;
    }
    Err(Error::Unresolved {
        nu,
        k_diss,
        cutoff,
        required_n,
    })
}
