//! Viscosity sweep driver and its trend checks.

use serde::Serialize;

use super::config::{resolution_guard, ExperimentConfig, BALL_MARGIN};
use super::output::{create_dir, fmt_f64, write_text};
use super::run::{simulate, SingleRun};
use crate::error::{Error, Result};
use crate::par;

/// Pairwise noise slack allowed in the decrease of `ε(ν)`.
pub const DECREASE_SLACK: f64 = 0.10;
/// Required `ε(ν_last)/ε(ν_first)`.
pub const DISSIPATION_RATIO: f64 = 0.5;

/// One sweep member: its viscosity and either a finished run or the error
/// that stopped it.
#[derive(Debug)]
pub struct SweepMember {
    pub nu: f64,
    pub outcome: Result<SingleRun>,
}

/// One named trend assertion over the sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct SweepResult {
    pub members: Vec<SweepMember>,
    pub trends: Vec<TrendCheck>,
}

impl SweepResult {
    pub fn completed(&self) -> impl Iterator<Item = (f64, &SingleRun)> {
        self.members
            .iter()
            .filter_map(|m| m.outcome.as_ref().ok().map(|r| (m.nu, r)))
    }

    pub fn failures(&self) -> impl Iterator<Item = (f64, &Error)> {
        self.members
            .iter()
            .filter_map(|m| m.outcome.as_ref().err().map(|e| (m.nu, e)))
    }

    pub fn passed(&self) -> bool {
        self.trends.iter().all(|t| t.pass)
    }

    /// `ε(ν)` of the completed members, in sweep order.
    pub fn dissipation_series(&self) -> Vec<(f64, f64)> {
        self.completed()
            .map(|(nu, r)| (nu, r.report.dissipation_rate))
            .collect()
    }

    pub fn sweep_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "nu",
            "mean_enstrophy",
            "mean_palinstrophy",
            "dissipation_rate",
            "balance_gap",
            "telescoping_slack",
            "T",
            "t0",
        ])?;
        for (nu, r) in self.completed() {
            let m = &r.report;
            w.write_record(
                [
                    nu,
                    m.mean_enstrophy,
                    m.mean_palinstrophy,
                    m.dissipation_rate,
                    m.balance_gap,
                    m.telescoping_slack,
                    m.horizon,
                    m.t0,
                ]
                .map(fmt_f64),
            )?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Per-member directories, merged `sweep.csv`, `failures.toml` and
    /// `trends.toml`.
    pub fn write(&self, dir: &std::path::Path) -> Result<()> {
        create_dir(dir)?;
        for (i, m) in self.members.iter().enumerate() {
            if let Ok(run) = &m.outcome {
                run.write(&dir.join(format!("nu_{i:02}")))?;
            }
        }
        write_text(&dir.join("sweep.csv"), &self.sweep_csv()?)?;

        #[derive(Serialize)]
        struct Failure {
            nu: f64,
            error: String,
        }
        #[derive(Serialize)]
        struct Manifest {
            failures: Vec<Failure>,
        }
        let manifest = Manifest {
            failures: self
                .failures()
                .map(|(nu, e)| Failure {
                    nu,
                    error: e.to_string(),
                })
                .collect(),
        };
        write_text(
            &dir.join("failures.toml"),
            &toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?,
        )?;

        #[derive(Serialize)]
        struct Trends<'a> {
            trend: &'a [TrendCheck],
        }
        write_text(
            &dir.join("trends.toml"),
            &toml::to_string(&Trends {
                trend: &self.trends,
            })
            .map_err(|e| Error::Config(e.to_string()))?,
        )
    }
}

fn check(name: &str, pass: bool, detail: String) -> TrendCheck {
    TrendCheck {
        name: name.to_string(),
        pass,
        detail,
    }
}

/// Trend assertions over completed members in decreasing-`ν` order.
pub fn sweep_trends(members: &[SweepMember]) -> Vec<TrendCheck> {
    let runs: Vec<&SingleRun> = members
        .iter()
        .filter_map(|m| m.outcome.as_ref().ok())
        .collect();
    let failed = members.len() - runs.len();
    let mut out = vec![check(
        "all_members_completed",
        failed == 0,
        format!("{failed} of {} members failed", members.len()),
    )];
    if runs.is_empty() {
        return out;
    }
    let eps: Vec<f64> = runs.iter().map(|r| r.report.dissipation_rate).collect();

    let worst_step = eps.windows(2).map(|w| w[1] / w[0]).fold(0.0_f64, f64::max);
    out.push(check(
        "dissipation_decreasing",
        eps.windows(2).all(|w| w[1] < w[0] * (1.0 + DECREASE_SLACK)),
        format!("largest successive ratio {worst_step:.4}"),
    ));
    let ratio = eps[eps.len() - 1] / eps[0];
    out.push(check(
        "dissipation_ratio",
        runs.len() >= 2 && ratio <= DISSIPATION_RATIO,
        format!("final/initial {ratio:.4} (limit {DISSIPATION_RATIO})"),
    ));

    let gap_excess = runs
        .iter()
        .map(|r| {
            let m = &r.report;
            m.balance_gap.abs()
                - (m.dissipation_rate + m.telescoping_slack + m.gineq.quadrature_tolerance)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(check(
        "balance_gap_bounded",
        gap_excess <= 0.0,
        format!("max |gap| - (eps + slack) = {gap_excess:.3e}"),
    ));
    let gaps: Vec<f64> = runs.iter().map(|r| r.report.balance_gap.abs()).collect();
    let (g0, g1) = (gaps[0], gaps[gaps.len() - 1]);
    out.push(check(
        "balance_gap_shrinking",
        g1 <= g0 * (1.0 + DECREASE_SLACK),
        format!("|gap| {g0:.4e} -> {g1:.4e}"),
    ));

    let gineq_bad = runs.iter().filter(|r| !r.report.gineq.holds()).count();
    out.push(check(
        "gineq",
        gineq_bad == 0,
        format!("{gineq_bad} members violate the inequality"),
    ));
    let worst_ball = runs
        .iter()
        .map(|r| r.report.support.l2 / r.ball_radius)
        .fold(0.0_f64, f64::max);
    out.push(check(
        "support_ball",
        worst_ball <= 1.0 + BALL_MARGIN,
        format!("max ||w||_2 / (||g||_2/gamma) = {worst_ball:.5}"),
    ));
    out
}

/// Run every configured viscosity concurrently (up to `cfg.workers`) and
/// collect the per-member reports. A failing member is recorded and does
/// not affect the others.
pub fn viscosity_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let nus = cfg
        .sweep
        .clone()
        .ok_or_else(|| Error::Config("no sweep list in config".into()))?;
    if nus.is_empty() {
        return Err(Error::Config("sweep list is empty".into()));
    }
    let g_l2 = cfg.forcing()?.norms().l2;
    for &nu in &nus {
        resolution_guard(&cfg.grid, nu, g_l2, cfg.solver.gamma)?;
    }
    let outcomes = par::with_workers(cfg.workers, || par::map(&nus, |&nu| simulate(cfg, nu)));
    let members: Vec<SweepMember> = nus
        .into_iter()
        .zip(outcomes)
        .map(|(nu, outcome)| SweepMember { nu, outcome })
        .collect();
    for m in &members {
        if let Err(e) = &m.outcome {
            log::warn!("sweep member nu = {} failed: {e}", m.nu);
        }
    }
    let trends = sweep_trends(&members);
    Ok(SweepResult { members, trends })
}

/// Closed-form `ε(ν) = ν|k|²(a/(γ + ν|k|²))²·L²/2` for the steady response
/// to `g = a cos(k·x)`.
pub fn laminar_dissipation(
    nu: f64,
    gamma: f64,
    k_sq: f64,
    amplitude: f64,
    domain_length: f64,
) -> f64 {
    let w = amplitude / (gamma + nu * k_sq);
    nu * k_sq * w * w * domain_length * domain_length / 2.0
}
