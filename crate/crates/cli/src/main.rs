//! `ddns`: run simulations, viscosity sweeps, the no-travel experiment and
//! the invariant suite from a TOML config.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ddns_core::experiments::{
    check, no_travel_experiment, parse_overrides, run_single, viscosity_sweep, ExperimentConfig,
    OVERRIDE_ENV,
};
use ddns_core::{par, Error};

const EXIT_INVARIANT: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ddns",
    version,
    about = "Damped driven 2D Navier-Stokes simulator and statistics harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for outputs (overrides `outputs` in the config).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads (overrides `workers` in the config).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for random initial data (overrides `seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Observe every this many steps (overrides `observer_stride`).
    #[arg(long, global = true)]
    observer_stride: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and write its time series and report.
    Simulate { config: PathBuf },
    /// Run every viscosity in the config's sweep list.
    Sweep { config: PathBuf },
    /// Track the enstrophy far from localized forcing.
    NoTravel { config: PathBuf },
    /// Run the invariant suite at small resolution.
    Check { config: Option<PathBuf> },
}

enum Outcome {
    Ok,
    Failed(String),
    BlowUp(String),
}

impl Cli {
    fn load(&self, path: &Path) -> ddns_core::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(dir) = &self.output_dir {
            cfg.outputs = dir.clone();
        }
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(stride) = self.observer_stride {
            cfg.observer_stride = stride;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn workers(&self, cfg: Option<&ExperimentConfig>) -> Option<usize> {
        self.workers.or_else(|| cfg.and_then(|c| c.workers))
    }
}

fn simulate(cfg: &ExperimentConfig) -> ddns_core::Result<Outcome> {
    let run = run_single(cfg)?;
    let m = &run.report;
    println!(
        "nu = {}  t0 = {:.4}  T = {:.4}  samples = {}",
        m.nu, m.t0, m.horizon, m.samples
    );
    println!("mean enstrophy     {:.6e}", m.mean_enstrophy);
    println!("mean palinstrophy  {:.6e}", m.mean_palinstrophy);
    println!("dissipation rate   {:.6e}", m.dissipation_rate);
    println!(
        "balance gap        {:.6e}  (slack {:.3e})",
        m.balance_gap, m.telescoping_slack
    );
    println!("outputs in {}", cfg.outputs.display());
    let mut bad = Vec::new();
    if !m.gineq.holds() {
        bad.push("gineq".to_string());
    }
    bad.extend(
        m.stationarity
            .iter()
            .filter(|s| !s.agrees())
            .map(|s| format!("stationarity:{}", s.name)),
    );
    Ok(if bad.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Failed(bad.join(", "))
    })
}

fn sweep(cfg: &ExperimentConfig) -> ddns_core::Result<Outcome> {
    let res = viscosity_sweep(cfg)?;
    res.write(&cfg.outputs)?;
    println!(
        "{:>12} {:>14} {:>14} {:>14}",
        "nu", "dissipation", "balance_gap", "slack"
    );
    for (nu, run) in res.completed() {
        let m = &run.report;
        println!(
            "{nu:>12.4e} {:>14.6e} {:>14.6e} {:>14.6e}",
            m.dissipation_rate, m.balance_gap, m.telescoping_slack
        );
    }
    for (nu, e) in res.failures() {
        println!("{nu:>12.4e} failed: {e}");
    }
    for t in &res.trends {
        println!(
            "{:<24} {}  {}",
            t.name,
            if t.pass { "ok  " } else { "FAIL" },
            t.detail
        );
    }
    println!("outputs in {}", cfg.outputs.display());
    if let Some((nu, e)) = res
        .failures()
        .find(|(_, e)| matches!(e, Error::BlowUp { .. }))
    {
        return Ok(Outcome::BlowUp(format!("nu = {nu}: {e}")));
    }
    let failed: Vec<_> = res
        .trends
        .iter()
        .filter(|t| !t.pass)
        .map(|t| t.name.clone())
        .collect();
    Ok(if failed.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Failed(failed.join(", "))
    })
}

fn no_travel(cfg: &ExperimentConfig) -> ddns_core::Result<Outcome> {
    let res = no_travel_experiment(cfg)?;
    res.write(&cfg.outputs)?;
    for (r, f) in res.radii.iter().zip(&res.max_fraction) {
        println!("R = {r:>8.4}  max Y_R/|w|^2 = {f:.4e}");
    }
    println!("outputs in {}", cfg.outputs.display());
    Ok(if res.passed() {
        Outcome::Ok
    } else {
        Outcome::Failed(format!(
            "largest-radius fraction {:.4e} exceeds {}",
            res.max_fraction.last().copied().unwrap_or(f64::NAN),
            res.threshold
        ))
    })
}

fn run_check(cfg: Option<&ExperimentConfig>) -> ddns_core::Result<Outcome> {
    let overrides = match std::env::var(OVERRIDE_ENV) {
        Ok(text) => parse_overrides(&text)?,
        Err(_) => Default::default(),
    };
    let report = check(cfg, &overrides)?;
    print!("{report}");
    Ok(if report.passed() {
        Outcome::Ok
    } else {
        Outcome::Failed(report.failures().join(", "))
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        Error::Config(_)
        | Error::Io { .. }
        | Error::InvalidParameter(_)
        | Error::InvalidGrid(_)
        | Error::Unresolved { .. }
        | Error::UnresolvedKernel { .. } => EXIT_CONFIG,
        _ => EXIT_INVARIANT,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = (|| {
        let cfg = match &cli.command {
            Command::Simulate { config }
            | Command::Sweep { config }
            | Command::NoTravel { config } => Some(cli.load(config)?),
            Command::Check { config } => config.as_deref().map(|p| cli.load(p)).transpose()?,
        };
        par::with_workers(cli.workers(cfg.as_ref()), || match (&cli.command, &cfg) {
            (Command::Simulate { .. }, Some(c)) => simulate(c),
            (Command::Sweep { .. }, Some(c)) => sweep(c),
            (Command::NoTravel { .. }, Some(c)) => no_travel(c),
            (Command::Check { .. }, c) => run_check(c.as_ref()),
            _ => unreachable!("config loaded for every subcommand that needs one"),
        })
    })();
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed(what)) => {
            eprintln!("invariant failure: {what}");
            ExitCode::from(EXIT_INVARIANT)
        }
        Ok(Outcome::BlowUp(what)) => {
            eprintln!("numerical blow-up: {what}");
            ExitCode::from(EXIT_BLOW_UP)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
