//! The `check` invariant suite: fast versions of every module property.

use std::collections::BTreeMap;
use std::fmt;

use super::config::ExperimentConfig;
use crate::dynamics::initial::{random_field, single_mode};
use crate::dynamics::{
    decay_envelope_check, energy_balance_residual, enstrophy_balance_residual, BalanceRecorder,
    EnvelopeNorm, Forcing, ForcingSpec, Integrator, SolverParams, TrajectoryState,
};
use crate::error::{Error, Result};
use crate::mollify::{
    commutator_rho, mollified_enstrophy_balance, mollify, MollifiedBalanceRecorder,
    MollifierKernel, RenormalizerBeta,
};
use crate::spectral::{
    biot_savart, curl, dealias, divergence, forward_transform, inner_product, inverse_transform,
    norms, GridSpec, SpectralField,
};
use crate::statistics::{
    catalog_functional, measure_report, stationarity_residual, AverageAccumulator, Shell,
    StatisticsObserver, CATALOG_NAMES,
};

/// Environment variable holding `name=tol[,name=tol…]` tolerance overrides.
pub const OVERRIDE_ENV: &str = "DDNS_CHECK_OVERRIDE";

/// Largest grid the suite runs at.
pub const CHECK_MAX_N: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.name)
            .collect()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<28} {:>12} {:>12}  status",
            "invariant", "value", "tolerance"
        )?;
        for r in &self.rows {
            let status = if r.pass { "ok" } else { "FAIL" };
            writeln!(
                f,
                "{:<28} {:>12.3e} {:>12.3e}  {status}",
                r.name, r.value, r.tolerance
            )?;
        }
        Ok(())
    }
}

/// Parse `name=tol` pairs separated by commas.
pub fn parse_overrides(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, tol) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {part:?} is not name=tol")))?;
        let tol: f64 = tol
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("override {part:?}: {e}")))?;
        out.insert(name.trim().to_string(), tol);
    }
    Ok(out)
}

/// Setting shared by the dynamic invariants.
struct Setup {
    grid: GridSpec,
    forcing: Forcing,
    params: SolverParams,
    omega0: SpectralField,
}

impl Setup {
    fn new(cfg: Option<&ExperimentConfig>) -> Result<Self> {
        let (grid, spec, nu, gamma, seed) = match cfg {
            Some(c) => {
                let n = c.grid.n().min(CHECK_MAX_N);
                let grid = GridSpec {
                    points_per_side: n,
                    ..c.grid
                };
                (grid, c.forcing.clone(), c.solver.nu, c.solver.gamma, c.seed)
            }
            None => (
                GridSpec::new(32)?,
                ForcingSpec::Kolmogorov {
                    k_f: 2,
                    amplitude: 1.0,
                },
                0.02,
                0.1,
                1,
            ),
        };
        let forcing = spec.build(&grid)?;
        let params = SolverParams {
            nu,
            gamma,
            dt: 2e-3,
            t0: 0.0,
            horizon: 0.4,
        };
        let omega0 = dealias(&random_field(grid, seed, 1, 4, 2.0 * grid.domain_length));
        Ok(Setup {
            grid,
            forcing,
            params,
            omega0,
        })
    }

    fn integrator(&self) -> Result<Integrator> {
        Integrator::new(self.grid, self.params, &self.forcing)
    }
}

type Probe = fn(&Setup) -> Result<f64>;

fn relative(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

fn fft_round_trip(s: &Setup) -> Result<f64> {
    let f = random_field(s.grid, 99, 1, s.grid.cutoff_mode(), 1.0).synthesize();
    let back = inverse_transform(&forward_transform(&f)?)?;
    Ok(relative(back.sub(&f)?.max_abs(), f.max_abs()))
}

fn biot_savart_divergence(s: &Setup) -> Result<f64> {
    let u = biot_savart(&s.omega0)?;
    Ok(relative(
        divergence(&u).synthesize().max_abs(),
        u.max_speed(),
    ))
}

fn curl_of_velocity(s: &Setup) -> Result<f64> {
    let u = biot_savart(&s.omega0)?;
    let back = curl(&u).synthesize();
    let w = s.omega0.synthesize();
    Ok(relative(back.sub(&w)?.max_abs(), w.max_abs()))
}

fn single_mode_decay(s: &Setup) -> Result<f64> {
    let zero = ForcingSpec::Zero.build(&s.grid)?;
    let params = SolverParams {
        nu: 0.05,
        gamma: 0.1,
        dt: 1e-3,
        t0: 0.0,
        horizon: 1.0,
    };
    let k = [2, 1];
    let w0 = single_mode(s.grid, k, 1.0);
    let it = Integrator::new(s.grid, params, &zero)?;
    let end = it.run(TrajectoryState::new(w0.clone()), 1000, 1000, &mut [])?;
    let unit = s.grid.wavenumber_unit();
    let k_sq = ((k[0] * k[0] + k[1] * k[1]) as f64) * unit * unit;
    let exact = w0.scaled((-params.linear_rate(k_sq) * end.time).exp());
    Ok(end.omega.sub(&exact)?.synthesize().max_abs())
}

/// `|e(dt)/e(dt/2) − 16|` for a forced single mode.
fn rk4_order(s: &Setup) -> Result<f64> {
    let spec = ForcingSpec::SingleMode {
        k: [4, 0],
        amplitude: 1.0,
    };
    let forcing = spec.build(&s.grid)?;
    let (gamma, nu) = (0.5, 0.2);
    let k_sq = 16.0 * s.grid.wavenumber_unit().powi(2);
    let sigma = gamma + nu * k_sq;
    let t_end = 2.0;
    let err = |dt: f64| -> Result<f64> {
        let params = SolverParams {
            nu,
            gamma,
            dt,
            t0: 0.0,
            horizon: t_end,
        };
        let w0 = SpectralField::zeros(s.grid);
        let it = Integrator::new(s.grid, params, &forcing)?;
        let end = it.run(
            TrajectoryState::new(w0),
            params.total_steps(),
            u64::MAX,
            &mut [],
        )?;
        let exact = forcing
            .g_hat()
            .scaled((1.0 - (-sigma * t_end).exp()) / sigma);
        Ok(end.omega.sub(&exact)?.synthesize().max_abs())
    };
    Ok((err(0.5)? / err(0.25)? - 16.0).abs())
}

fn balance_samples(s: &Setup) -> Result<Vec<crate::dynamics::BalanceSample>> {
    let mut rec = BalanceRecorder::new(&s.forcing);
    s.integrator()?.run(
        TrajectoryState::new(s.omega0.clone()),
        s.params.total_steps(),
        1,
        &mut [&mut rec],
    )?;
    Ok(rec.samples)
}

fn energy_balance(s: &Setup) -> Result<f64> {
    energy_balance_residual(&balance_samples(s)?, &s.params)
}

fn enstrophy_balance(s: &Setup) -> Result<f64> {
    enstrophy_balance_residual(&balance_samples(s)?, &s.params)
}

fn envelope(s: &Setup, norm: EnvelopeNorm) -> Result<f64> {
    let samples = balance_samples(s)?;
    let w0 = norms(&s.omega0.synthesize());
    let g = s.forcing.norms();
    let (a0, src) = match norm {
        EnvelopeNorm::L2 => (w0.l2, g.l2),
        EnvelopeNorm::LInf => (w0.linf, g.linf),
    };
    let rep = decay_envelope_check(&samples, a0, src, s.params.gamma, norm);
    // excess over the bound, in units of the allowed slack
    Ok(rep.max_excess.max(0.0) / rep.tolerance)
}

fn envelope_l2(s: &Setup) -> Result<f64> {
    envelope(s, EnvelopeNorm::L2)
}

fn envelope_linf(s: &Setup) -> Result<f64> {
    envelope(s, EnvelopeNorm::LInf)
}

fn kernel(s: &Setup) -> Result<MollifierKernel> {
    MollifierKernel::new(s.grid, 6.0 * s.grid.spacing())
}

fn flux_identity(s: &Setup) -> Result<f64> {
    let k = kernel(s)?;
    let u = biot_savart(&s.omega0)?;
    let w = s.omega0.synthesize();
    let flux = commutator_rho(&u, &w, &k)?;
    let scale = flux
        .product_defect
        .u1
        .max_abs()
        .max(flux.product_defect.u2.max_abs());
    Ok(relative(flux.identity_defect(), scale))
}

fn mollifier_self_adjoint(s: &Setup) -> Result<f64> {
    let k = kernel(s)?;
    let f = random_field(s.grid, 5, 1, 12, 1.0).synthesize();
    let g = random_field(s.grid, 6, 1, 12, 1.0).synthesize();
    let a = inner_product(&mollify(&f, &k)?, &g)?;
    let b = inner_product(&f, &mollify(&g, &k)?)?;
    Ok((a - b).abs())
}

fn mollified_balance(s: &Setup) -> Result<f64> {
    let k = kernel(s)?;
    let mut rec = MollifiedBalanceRecorder::new(&s.forcing, &k);
    s.integrator()?.run(
        TrajectoryState::new(s.omega0.clone()),
        s.params.total_steps(),
        1,
        &mut [&mut rec],
    )?;
    Ok(mollified_enstrophy_balance(&rec.samples, &s.params)?.max_defect)
}

fn psi_gradient(s: &Setup) -> Result<f64> {
    let k = kernel(s)?;
    let b = RenormalizerBeta::new(1.0)?;
    let w = s.omega0.synthesize();
    let phi = random_field(s.grid, 7, 1, 6, 1.0).synthesize();
    let mut worst = 0.0_f64;
    for name in CATALOG_NAMES {
        let f = catalog_functional(name, s.grid, Some((&k, &b)))?;
        let exact = inner_product(&f.gradient(&w)?, &phi)?;
        let d = 1e-3;
        let fd = (f.eval(&w.add(&phi.scaled(d))?)? - f.eval(&w.sub(&phi.scaled(d))?)?) / (2.0 * d);
        worst = worst.max(relative((fd - exact).abs(), exact.abs().max(1.0)));
    }
    Ok(worst)
}

/// Largest `|residual − telescoped| / tolerance` over the catalog.
fn stationarity_oracle(s: &Setup) -> Result<f64> {
    let k = kernel(s)?;
    let b = RenormalizerBeta::new(1.0)?;
    let fs = CATALOG_NAMES
        .iter()
        .map(|n| catalog_functional(n, s.grid, Some((&k, &b))))
        .collect::<Result<Vec<_>>>()?;
    let mut obs = StatisticsObserver::new(&s.forcing, s.params, &fs, vec![]);
    s.integrator()?.run(
        TrajectoryState::new(s.omega0.clone()),
        s.params.total_steps(),
        2,
        &mut [&mut obs],
    )?;
    let mut worst = 0.0_f64;
    for f in &fs {
        let r = stationarity_residual(obs.accumulator(), f.name())?;
        worst = worst.max((r.residual - r.telescoped).abs() / r.tolerance);
    }
    Ok(worst)
}

/// `(dissipation − net injection − slack − quadrature)`, positive on failure.
fn gineq(s: &Setup) -> Result<f64> {
    let shell = Shell::new(0.0, f64::INFINITY);
    let mut obs = StatisticsObserver::new(&s.forcing, s.params, &[], vec![shell]);
    s.integrator()?.run(
        TrajectoryState::new(s.omega0.clone()),
        s.params.total_steps(),
        2,
        &mut [&mut obs],
    )?;
    let g = measure_report(obs.accumulator(), &s.params, &[shell])?.gineq;
    Ok(g.dissipation - g.net_injection - g.slack - g.quadrature_tolerance)
}

fn accumulator_linearity(_: &Setup) -> Result<f64> {
    let mut acc = AverageAccumulator::new(["a", "b", "c"]);
    for i in 0..50 {
        let t = i as f64 * 0.1;
        let (a, b) = (t.sin(), (3.0 * t).cos());
        acc.push(t, &[a, b, 2.0 * a - 0.5 * b])?;
    }
    let combo = acc.average_combination(&[(0, 2.0), (1, -0.5)])?;
    Ok((combo - acc.average(2)?).abs())
}

const INVARIANTS: [(&str, Probe, f64); 16] = [
    ("fft_round_trip", fft_round_trip, 1e-12),
    ("biot_savart_divergence_free", biot_savart_divergence, 1e-12),
    ("curl_inverts_biot_savart", curl_of_velocity, 1e-12),
    ("single_mode_decay", single_mode_decay, 1e-8),
    ("rk4_order", rk4_order, 4.0),
    ("energy_balance", energy_balance, 1e-4),
    ("enstrophy_balance", enstrophy_balance, 1e-4),
    ("decay_envelope_l2", envelope_l2, 1.0),
    ("decay_envelope_linf", envelope_linf, 1.0),
    ("flux_identity", flux_identity, 1e-9),
    ("mollifier_self_adjoint", mollifier_self_adjoint, 1e-12),
    ("mollified_balance", mollified_balance, 1e-4),
    ("psi_gradient", psi_gradient, 1e-5),
    ("stationarity_oracle", stationarity_oracle, 1.0),
    ("gineq", gineq, 0.0),
    ("accumulator_linearity", accumulator_linearity, 1e-12),
];

/// Names of all invariants in the suite.
pub fn invariant_names() -> Vec<&'static str> {
    INVARIANTS.iter().map(|(n, _, _)| *n).collect()
}

/// Run the suite. A row passes when its value is at most its tolerance;
/// `overrides` replace default tolerances by name.
pub fn check(
    cfg: Option<&ExperimentConfig>,
    overrides: &BTreeMap<String, f64>,
) -> Result<CheckReport> {
    if let Some(unknown) = overrides
        .keys()
        .find(|k| !invariant_names().contains(&k.as_str()))
    {
        return Err(Error::Config(format!(
            "override names unknown invariant {unknown:?}"
        )));
    }
    let setup = Setup::new(cfg)?;
    let mut rows = Vec::with_capacity(INVARIANTS.len());
    for (name, probe, default) in INVARIANTS {
        let tolerance = overrides.get(name).copied().unwrap_or(default);
        let (value, pass) = match probe(&setup) {
            Ok(v) => (v, v <= tolerance),
            Err(e) => {
                log::error!("invariant {name}: {e}");
                (f64::NAN, false)
            }
        };
        rows.push(CheckRow {
            name,
            value,
            tolerance,
            pass,
        });
    }
    Ok(CheckReport { rows })
}
