//! Single-trajectory driver.

use std::path::Path;

use serde::Serialize;

use super::config::{
    derived_transient, dissipation_wavenumber, resolution_guard, ExperimentConfig,
};
use super::output::{create_dir, fmt_f64, write_text};
use crate::dynamics::{Integrator, SolverParams, TrajectoryState};
use crate::error::Result;
use crate::spectral::norms;
use crate::statistics::{measure_report, MeasureReport, SeriesRow, Shell, StatisticsObserver};

/// Result of one trajectory.
#[derive(Clone, Debug)]
pub struct SingleRun {
    pub params: SolverParams,
    pub report: MeasureReport,
    pub series: Vec<SeriesRow>,
    pub shells: Vec<Shell>,
    /// `‖g‖₂/γ`
    pub ball_radius: f64,
    pub k_diss: f64,
    pub cutoff: f64,
    pub max_cfl: f64,
}

#[derive(Serialize)]
struct RunReportFile<'a> {
    nu: f64,
    gamma: f64,
    dt: f64,
    t0: f64,
    horizon: f64,
    ball_radius: f64,
    k_diss: f64,
    cutoff_wavenumber: f64,
    max_cfl: f64,
    measure: &'a MeasureReport,
}

impl SingleRun {
    pub fn report_toml(&self) -> Result<String> {
        let file = RunReportFile {
            nu: self.params.nu,
            gamma: self.params.gamma,
            dt: self.params.dt,
            t0: self.params.t0,
            horizon: self.params.horizon,
            ball_radius: self.ball_radius,
            k_diss: self.k_diss,
            cutoff_wavenumber: self.cutoff,
            max_cfl: self.max_cfl,
            measure: &self.report,
        };
        toml::to_string(&file).map_err(|e| crate::Error::Config(e.to_string()))
    }

    /// Fraction of samples at or after `t₀` with `‖ω‖₂ > (1 + margin)·‖g‖₂/γ`.
    pub fn ball_exit_fraction(&self, margin: f64) -> f64 {
        let after: Vec<_> = self
            .series
            .iter()
            .filter(|r| r.sample.t >= self.report.t0 - 1e-9)
            .collect();
        if after.is_empty() {
            return 0.0;
        }
        let out = after
            .iter()
            .filter(|r| r.sample.l2 > (1.0 + margin) * self.ball_radius)
            .count();
        out as f64 / after.len() as f64
    }

    /// Write `timeseries.csv` and `report.toml` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        create_dir(dir)?;
        let path = dir.join("timeseries.csv");
        let mut w = csv::Writer::from_path(&path)?;
        let mut header: Vec<String> = [
            "t",
            "energy",
            "enstrophy",
            "palinstrophy",
            "injection",
            "linf",
            "l1",
            "l2",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend(self.shells.iter().map(Shell::occupancy_channel));
        w.write_record(&header)?;
        for row in &self.series {
            let s = &row.sample;
            let mut rec: Vec<String> = [
                s.t,
                s.energy,
                s.enstrophy,
                s.palinstrophy,
                s.injection,
                s.linf,
                s.l1,
                s.l2,
            ]
            .iter()
            .map(|v| fmt_f64(*v))
            .collect();
            rec.extend(
                row.in_shell
                    .iter()
                    .map(|b| if *b { "1" } else { "0" }.to_string()),
            );
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| crate::Error::io(&path, e))?;
        write_text(&dir.join("report.toml"), &self.report_toml()?)
    }
}

/// Integrate one trajectory at viscosity `nu` and assemble its report.
pub fn simulate(cfg: &ExperimentConfig, nu: f64) -> Result<SingleRun> {
    let grid = cfg.grid;
    let forcing = cfg.forcing()?;
    let g_l2 = forcing.norms().l2;
    let gamma = cfg.solver.gamma;
    resolution_guard(&grid, nu, g_l2, gamma)?;
    let omega0 = cfg.initial()?;
    let t0 = match cfg.solver.t0 {
        Some(t0) => t0,
        None => derived_transient(norms(&omega0.synthesize()).l2, g_l2, gamma),
    };
    let params = cfg.params(nu, t0)?;
    let functionals = cfg.functionals()?;
    let mut obs =
        StatisticsObserver::new(&forcing, params, &functionals, cfg.shells.clone()).with_series();
    let integrator = Integrator::new(grid, params, &forcing)?;
    integrator.run(
        TrajectoryState::new(omega0),
        params.total_steps(),
        cfg.observer_stride,
        &mut [&mut obs],
    )?;
    let report = measure_report(obs.accumulator(), &params, &cfg.shells)?;
    Ok(SingleRun {
        params,
        report,
        series: obs.series().to_vec(),
        shells: cfg.shells.clone(),
        ball_radius: g_l2 / gamma,
        k_diss: dissipation_wavenumber(nu, g_l2, gamma, grid.area()),
        cutoff: grid.cutoff_wavenumber(),
        max_cfl: integrator.max_cfl_number(),
    })
}

/// Run the configured trajectory and write its outputs under `cfg.outputs`.
pub fn run_single(cfg: &ExperimentConfig) -> Result<SingleRun> {
    let run = simulate(cfg, cfg.solver.nu)?;
    run.write(&cfg.outputs)?;
    Ok(run)
}
