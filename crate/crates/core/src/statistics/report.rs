//! Averaged quantities of an empirical stationary measure.

use serde::Serialize;

use super::accumulator::AverageAccumulator;
use super::observer::{
    psi_channel, rate_channel, term_scale_channel, Shell, BALANCE, ENERGY, ENSTROPHY, INJECTION,
    L1, L2, LINF, PALINSTROPHY,
};
use crate::dynamics::SolverParams;
use crate::error::Result;

/// Relative roundoff floor added to quadrature tolerances.
const ROUNDOFF: f64 = 1e-12;
/// Absolute floor, for channels that are identically zero up to roundoff.
const ABSOLUTE_FLOOR: f64 = 1e-15;
/// Allowance for the time-stepping defect in the stationarity identity,
/// relative to the size of the individual rate terms. The samples come from
/// the discrete trajectory, whose derivative differs from the exact rate by
/// the local error of the step (a fixed point of the step is not an exact
/// steady state), so the two sides differ at the level `O(dt⁴)` even with
/// exact quadrature.
const STEPPING_ALLOWANCE: f64 = 1e-10;

/// Time-averaged `F1 + νF2 + F3` against the telescoped boundary values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationarityResidual {
    pub name: String,
    /// `⟨F1 + νF2 + F3⟩`
    pub residual: f64,
    /// `(Ψ(t₀) − Ψ(t₀+T))/T`
    pub telescoped: f64,
    /// `|Ψ(t₀+T) − Ψ(t₀)|/T`
    pub telescoped_bound: f64,
    pub tolerance: f64,
}

impl StationarityResidual {
    pub fn agrees(&self) -> bool {
        (self.residual - self.telescoped).abs() <= self.tolerance
    }
}

/// Time average of the balance integrand restricted to a shell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellBalance {
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    /// Fraction of the window spent in the shell.
    pub occupancy: f64,
    /// Set when no sample fell in the shell; `value` is then 0.
    pub empty: bool,
}

/// Largest norms of `ω` over the averaged samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupportRadii {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// `ν⟨‖∇ω‖²⟩ ≤ ⟨⟨g,ω⟩⟩ − γ⟨‖ω‖²⟩` up to the finite-window slack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GineqCheck {
    pub dissipation: f64,
    pub net_injection: f64,
    /// `(‖ω(t₀)‖² + ‖ω(t₀+T)‖²)/(2T)`
    pub slack: f64,
    pub quadrature_tolerance: f64,
    /// `|⟨γ‖ω‖² + ν‖∇ω‖² − ⟨g,ω⟩⟩ − (‖ω(t₀)‖² − ‖ω(t₀+T)‖²)/(2T)|`
    pub identity_defect: f64,
}

impl GineqCheck {
    pub fn holds(&self) -> bool {
        self.dissipation <= self.net_injection + self.slack + self.quadrature_tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub nu: f64,
    pub gamma: f64,
    /// Time of the first averaged sample.
    pub t0: f64,
    /// Averaging window length.
    #[serde(rename = "T")]
    pub horizon: f64,
    pub samples: usize,
    pub mean_energy: f64,
    pub mean_enstrophy: f64,
    pub mean_palinstrophy: f64,
    pub mean_injection: f64,
    /// `ν · mean_palinstrophy`
    pub dissipation_rate: f64,
    /// `γ⟨‖ω‖²⟩ − ⟨⟨g,ω⟩⟩`
    pub balance_gap: f64,
    pub telescoping_slack: f64,
    pub gineq: GineqCheck,
    pub support: SupportRadii,
    pub stationarity: Vec<StationarityResidual>,
    pub shells: Vec<ShellBalance>,
}

pub fn stationarity_residual(acc: &AverageAccumulator, name: &str) -> Result<StationarityResidual> {
    let psi = acc.channel(&psi_channel(name))?;
    let rate = acc.channel(&rate_channel(name))?;
    let residual = acc.average(rate)?;
    let t = acc.elapsed();
    let diff = acc.first_value(psi).unwrap_or(0.0) - acc.last_value(psi).unwrap_or(0.0);
    let terms = acc.max_abs(acc.channel(&term_scale_channel(name))?);
    let floor = ROUNDOFF * (acc.max_abs(rate) + 2.0 * acc.max_abs(psi) / t)
        + STEPPING_ALLOWANCE * terms
        + ABSOLUTE_FLOOR;
    Ok(StationarityResidual {
        name: name.to_string(),
        residual,
        telescoped: diff / t,
        telescoped_bound: diff.abs() / t,
        tolerance: 2.0 * acc.quadrature_error(rate)? + floor,
    })
}

pub fn shell_balance(acc: &AverageAccumulator, shell: Shell) -> Result<ShellBalance> {
    let occupancy = acc.average(acc.channel(&shell.occupancy_channel())?)?;
    let empty = acc.max_abs(acc.channel(&shell.occupancy_channel())?) == 0.0;
    let value = if empty {
        0.0
    } else {
        acc.average(acc.channel(&shell.integrand_channel())?)?
    };
    Ok(ShellBalance {
        lower: shell.lower,
        upper: shell.upper,
        value,
        occupancy,
        empty,
    })
}

/// Assemble every averaged quantity registered in `acc`.
pub fn measure_report(
    acc: &AverageAccumulator,
    params: &SolverParams,
    shells: &[Shell],
) -> Result<MeasureReport> {
    let t = acc.elapsed();
    let avg = |name: &str| acc.average_named(name);
    let z = acc.channel(ENSTROPHY)?;
    let balance = acc.channel(BALANCE)?;
    let (z0, z1) = (
        acc.first_value(z).unwrap_or(0.0),
        acc.last_value(z).unwrap_or(0.0),
    );

    let mean_enstrophy = avg(ENSTROPHY)?;
    let mean_palinstrophy = avg(PALINSTROPHY)?;
    let mean_injection = avg(INJECTION)?;
    let dissipation_rate = params.nu * mean_palinstrophy;
    let slack = (z0 + z1) / (2.0 * t);
    let quad =
        2.0 * acc.quadrature_error(balance)? + ROUNDOFF * acc.max_abs(balance) + ABSOLUTE_FLOOR;
    let gineq = GineqCheck {
        dissipation: dissipation_rate,
        net_injection: mean_injection - params.gamma * mean_enstrophy,
        slack,
        quadrature_tolerance: quad,
        identity_defect: (acc.average(balance)? - (z0 - z1) / (2.0 * t)).abs(),
    };

    let stationarity = acc
        .names()
        .iter()
        .filter_map(|n| n.strip_prefix("psi:"))
        .map(|name| stationarity_residual(acc, name))
        .collect::<Result<Vec<_>>>()?;
    let shells = shells
        .iter()
        .map(|s| shell_balance(acc, *s))
        .collect::<Result<Vec<_>>>()?;

    Ok(MeasureReport {
        nu: params.nu,
        gamma: params.gamma,
        t0: acc.start().unwrap_or(0.0),
        horizon: t,
        samples: acc.samples(),
        mean_energy: avg(ENERGY)?,
        mean_enstrophy,
        mean_palinstrophy,
        mean_injection,
        dissipation_rate,
        balance_gap: params.gamma * mean_enstrophy - mean_injection,
        telescoping_slack: slack,
        gineq,
        support: SupportRadii {
            l1: acc.max_abs(acc.channel(L1)?),
            l2: acc.max_abs(acc.channel(L2)?),
            linf: acc.max_abs(acc.channel(LINF)?),
        },
        stationarity,
        shells,
    })
}
