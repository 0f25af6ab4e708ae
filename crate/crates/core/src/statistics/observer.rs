//! Trajectory observer feeding the time averages.

use serde::{Deserialize, Serialize};

use super::accumulator::AverageAccumulator;
use super::functional::TestFunctional;
use crate::dynamics::{BalanceSample, Forcing, Observer, SolverParams, TrajectoryState};
use crate::error::Result;

/// The enstrophy shell `E₁ ≤ ‖ω‖₂ ≤ E₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub lower: f64,
    #[serde(default = "infinite")]
    pub upper: f64,
}

fn infinite() -> f64 {
    f64::INFINITY
}

impl Shell {
    pub fn new(lower: f64, upper: f64) -> Self {
        Shell { lower, upper }
    }

    pub fn contains(&self, l2: f64) -> bool {
        self.lower <= l2 && l2 <= self.upper
    }

    pub fn occupancy_channel(&self) -> String {
        format!("shell_occupancy[{:e}:{:e}]", self.lower, self.upper)
    }

    pub fn integrand_channel(&self) -> String {
        format!("shell_integrand[{:e}:{:e}]", self.lower, self.upper)
    }
}

pub const ENERGY: &str = "energy";
pub const ENSTROPHY: &str = "enstrophy";
pub const PALINSTROPHY: &str = "palinstrophy";
pub const INJECTION: &str = "injection";
/// `γ‖ω‖² + ν‖∇ω‖² − ⟨g,ω⟩`
pub const BALANCE: &str = "balance";
pub const L1: &str = "l1";
pub const L2: &str = "l2";
pub const LINF: &str = "linf";

pub fn psi_channel(name: &str) -> String {
    format!("psi:{name}")
}

pub fn rate_channel(name: &str) -> String {
    format!("rate:{name}")
}

/// `|F1| + ν|F2| + |F3|`, the size of the terms that cancel in the rate.
pub fn term_scale_channel(name: &str) -> String {
    format!("term_scale:{name}")
}

/// One row of the diagnostic time series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesRow {
    pub sample: BalanceSample,
    pub in_shell: Vec<bool>,
}

/// Records balance samples, functional rates and shell indicators, and
/// accumulates them from the configured start step onward.
pub struct StatisticsObserver<'a> {
    forcing: &'a Forcing,
    params: SolverParams,
    functionals: &'a [TestFunctional],
    shells: Vec<Shell>,
    start_step: u64,
    accumulator: AverageAccumulator,
    record_series: bool,
    series: Vec<SeriesRow>,
}

impl<'a> StatisticsObserver<'a> {
    pub fn new(
        forcing: &'a Forcing,
        params: SolverParams,
        functionals: &'a [TestFunctional],
        shells: Vec<Shell>,
    ) -> Self {
        let mut names: Vec<String> = [
            ENERGY,
            ENSTROPHY,
            PALINSTROPHY,
            INJECTION,
            BALANCE,
            L1,
            L2,
            LINF,
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for f in functionals {
            names.push(psi_channel(f.name()));
            names.push(rate_channel(f.name()));
            names.push(term_scale_channel(f.name()));
        }
        for s in &shells {
            names.push(s.occupancy_channel());
            names.push(s.integrand_channel());
        }
        StatisticsObserver {
            forcing,
            params,
            functionals,
            shells,
            start_step: params.start_step(),
            accumulator: AverageAccumulator::new(names),
            record_series: false,
            series: Vec::new(),
        }
    }

    /// Also keep every observed sample, including the transient.
    pub fn with_series(mut self) -> Self {
        self.record_series = true;
        self
    }

    pub fn accumulator(&self) -> &AverageAccumulator {
        &self.accumulator
    }

    pub fn shells(&self) -> &[Shell] {
        &self.shells
    }

    pub fn series(&self) -> &[SeriesRow] {
        &self.series
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }
}

impl Observer for StatisticsObserver<'_> {
    fn observe(&mut self, state: &TrajectoryState) -> Result<()> {
        let s = BalanceSample::compute(state, self.forcing)?;
        let in_shell: Vec<bool> = self.shells.iter().map(|sh| sh.contains(s.l2)).collect();
        if state.step_count >= self.start_step {
            let p = &self.params;
            let balance = p.gamma * s.enstrophy + p.nu * s.palinstrophy - s.injection;
            let mut values = vec![
                s.energy,
                s.enstrophy,
                s.palinstrophy,
                s.injection,
                balance,
                s.l1,
                s.l2,
                s.linf,
            ];
            for f in self.functionals {
                let r = f.rates(&state.omega, p.gamma, self.forcing)?;
                values.push(r.psi);
                values.push(r.rate(p.nu));
                values.push(r.f1.abs() + p.nu * r.f2.abs() + r.f3.abs());
            }
            for &inside in &in_shell {
                let ind = if inside { 1.0 } else { 0.0 };
                values.push(ind);
                values.push(ind * balance);
            }
            self.accumulator.push(state.time, &values)?;
        }
        if self.record_series {
            self.series.push(SeriesRow {
                sample: s,
                in_shell,
            });
        }
        Ok(())
    }
}
