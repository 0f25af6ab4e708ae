//! Pointwise-in-time balance diagnostics.

use serde::{Deserialize, Serialize};

use super::forcing::Forcing;
use super::params::SolverParams;
use super::solver::{nonlinear_term, Observer, TrajectoryState};
use crate::error::{Error, Result};
use crate::spectral::{
    biot_savart, gradient, inner_product, norms, spectral_quadratic, vector_inner_product,
    SpectralField,
};

/// Scalar diagnostics of one snapshot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BalanceSample {
    pub t: f64,
    /// `‖u‖²`
    pub energy: f64,
    /// `‖ω‖²`, which also equals `‖∇u‖²` on the torus.
    pub enstrophy: f64,
    /// `‖∇ω‖²`
    pub palinstrophy: f64,
    /// `⟨f, u⟩`
    pub energy_injection: f64,
    /// `⟨g, ω⟩`
    pub injection: f64,
    /// `⟨|f|, |u|⟩`
    pub energy_scale: f64,
    /// `⟨|g|, |ω|⟩`
    pub enstrophy_scale: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl BalanceSample {
    pub fn compute(state: &TrajectoryState, forcing: &Forcing) -> Result<Self> {
        let omega = state.omega.synthesize();
        let u = biot_savart(&state.omega)?;
        let grad = gradient(&state.omega);
        let f = forcing.force_solenoidal();
        let nm = norms(&omega);
        Ok(BalanceSample {
            t: state.time,
            energy: vector_inner_product(&u, &u)?,
            enstrophy: inner_product(&omega, &omega)?,
            palinstrophy: vector_inner_product(&grad, &grad)?,
            energy_injection: vector_inner_product(f, &u)?,
            injection: inner_product(forcing.g(), &omega)?,
            energy_scale: inner_product(&f.magnitude(), &u.magnitude())?,
            enstrophy_scale: inner_product(&forcing.g().map(f64::abs), &omega.map(f64::abs))?,
            l1: nm.l1,
            l2: nm.l2,
            linf: nm.linf,
        })
    }
}

/// Observer that records a [`BalanceSample`] per call.
pub struct BalanceRecorder<'a> {
    forcing: &'a Forcing,
    pub samples: Vec<BalanceSample>,
}

impl<'a> BalanceRecorder<'a> {
    pub fn new(forcing: &'a Forcing) -> Self {
        BalanceRecorder {
            forcing,
            samples: Vec::new(),
        }
    }
}

impl Observer for BalanceRecorder<'_> {
    fn observe(&mut self, state: &TrajectoryState) -> Result<()> {
        self.samples
            .push(BalanceSample::compute(state, self.forcing)?);
        Ok(())
    }
}

/// Max over interior samples of `|½ dq/dt + rest|`, with the derivative by
/// centered differences, divided by the largest `scale`.
fn centered_residual(
    samples: &[BalanceSample],
    quantity: impl Fn(&BalanceSample) -> f64,
    rest: impl Fn(&BalanceSample) -> f64,
    scale: impl Fn(&BalanceSample) -> f64,
) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    let mut worst = 0.0_f64;
    let mut norm = 0.0_f64;
    for w in samples.windows(3) {
        let dq = (quantity(&w[2]) - quantity(&w[0])) / (w[2].t - w[0].t);
        worst = worst.max((0.5 * dq + rest(&w[1])).abs());
        norm = norm.max(scale(&w[1]));
    }
    Ok(if norm > 0.0 { worst / norm } else { worst })
}

/// Normalized residual of `d/2dt‖u‖² + γ‖u‖² + ν‖∇u‖² − ⟨f,u⟩`.
pub fn energy_balance_residual(samples: &[BalanceSample], params: &SolverParams) -> Result<f64> {
    centered_residual(
        samples,
        |s| s.energy,
        |s| params.gamma * s.energy + params.nu * s.enstrophy - s.energy_injection,
        |s| s.energy_scale + params.gamma * s.energy,
    )
}

/// Normalized residual of `d/2dt‖ω‖² + ν‖∇ω‖² + γ‖ω‖² − ⟨g,ω⟩`.
pub fn enstrophy_balance_residual(samples: &[BalanceSample], params: &SolverParams) -> Result<f64> {
    centered_residual(
        samples,
        |s| s.enstrophy,
        |s| params.gamma * s.enstrophy + params.nu * s.palinstrophy - s.injection,
        |s| s.enstrophy_scale + params.gamma * s.enstrophy,
    )
}

/// Which `L^p` envelope to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeNorm {
    L2,
    LInf,
}

/// Relative slack granted to the `L^∞` envelope for spectral overshoot.
pub const LINF_ENVELOPE_SLACK: f64 = 1e-3;
/// Relative slack for the `L²` envelope (round-off only).
pub const L2_ENVELOPE_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeViolation {
    pub t: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub norm: EnvelopeNorm,
    pub checked: usize,
    pub tolerance: f64,
    /// Largest `value − bound` seen (negative when strictly inside).
    pub max_excess: f64,
    pub violations: Vec<EnvelopeViolation>,
}

impl EnvelopeReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `e^{−γt}(a₀ − G) + G` with `G = ‖g‖/γ`.
pub fn envelope_bound(t: f64, initial: f64, source: f64, gamma: f64) -> f64 {
    let limit = source / gamma;
    (-gamma * t).exp() * (initial - limit) + limit
}

/// Check `‖ω(t)‖_p ≤ e^{−γt}(‖ω₀‖_p − ‖g‖_p/γ) + ‖g‖_p/γ + tol` at every
/// sample, with `t` measured from the initial state.
pub fn decay_envelope_check(
    samples: &[BalanceSample],
    initial_norm: f64,
    source_norm: f64,
    gamma: f64,
    norm: EnvelopeNorm,
) -> EnvelopeReport {
    let slack = match norm {
        EnvelopeNorm::L2 => L2_ENVELOPE_SLACK,
        EnvelopeNorm::LInf => LINF_ENVELOPE_SLACK,
    };
    let tolerance = slack * (initial_norm + source_norm / gamma);
    let mut max_excess = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for s in samples {
        let value = match norm {
            EnvelopeNorm::L2 => s.l2,
            EnvelopeNorm::LInf => s.linf,
        };
        let bound = envelope_bound(s.t, initial_norm, source_norm, gamma);
        max_excess = max_excess.max(value - bound);
        if value > bound + tolerance {
            violations.push(EnvelopeViolation {
                t: s.t,
                value,
                bound,
            });
        }
    }
    EnvelopeReport {
        norm,
        checked: samples.len(),
        tolerance,
        max_excess,
        violations,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SteadyResidual {
    /// `‖γω + u·∇ω − νΔω − g‖₂`
    pub l2: f64,
    /// `|γ‖ω‖² + ν‖∇ω‖² − ⟨g,ω⟩|`
    pub balance_defect: f64,
}

/// How far `omega` is from solving the stationary equation.
pub fn steady_state_residual(
    omega: &SpectralField,
    params: &SolverParams,
    forcing: &Forcing,
) -> Result<SteadyResidual> {
    let adv = nonlinear_term(omega)?;
    let residual = omega
        .map_modes(|k1, k2, c| params.linear_rate(k1 * k1 + k2 * k2) * c)
        .add(&adv)?
        .sub(forcing.g_hat())?;
    let enstrophy = spectral_quadratic(omega, |_, _| 1.0);
    let palinstrophy = spectral_quadratic(omega, |k1, k2| k1 * k1 + k2 * k2);
    let injection = crate::spectral::spectral_inner_product(forcing.g_hat(), omega)?;
    Ok(SteadyResidual {
        l2: spectral_quadratic(&residual, |_, _| 1.0).sqrt(),
        balance_defect: (params.gamma * enstrophy + params.nu * palinstrophy - injection).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{initial, integrate, ForcingSpec};
    use crate::spectral::GridSpec;

    fn p(nu: f64, gamma: f64, dt: f64, horizon: f64) -> SolverParams {
        SolverParams {
            nu,
            gamma,
            dt,
            t0: 0.0,
            horizon,
        }
    }

    #[test]
    fn too_few_samples() {
        let s = vec![BalanceSample::default(); 2];
        assert!(matches!(
            energy_balance_residual(&s, &p(0.0, 1.0, 1.0, 1.0)),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn zero_solution_has_zero_residuals() {
        let g = GridSpec::new(16).unwrap();
        let f = ForcingSpec::Zero.build(&g).unwrap();
        let params = p(0.01, 0.1, 0.01, 0.5);
        let mut rec = BalanceRecorder::new(&f);
        integrate(&SpectralField::zeros(g), &params, &f, 5, &mut [&mut rec]).unwrap();
        assert_eq!(energy_balance_residual(&rec.samples, &params).unwrap(), 0.0);
        assert_eq!(
            enstrophy_balance_residual(&rec.samples, &params).unwrap(),
            0.0
        );
        let env = decay_envelope_check(&rec.samples, 0.0, 0.0, 0.1, EnvelopeNorm::L2);
        assert!(env.holds());
    }

    #[test]
    fn forced_steady_single_mode_balances() {
        let g = GridSpec::new(32).unwrap();
        let f = ForcingSpec::SingleMode {
            k: [1, 0],
            amplitude: 1.0,
        }
        .build(&g)
        .unwrap();
        let params = p(0.01, 0.1, 0.01, 0.0);
        // the closed-form fixed point ω = g/(γ + ν|k|²)
        let w = f.g_hat().scaled(1.0 / 0.11);
        let r = steady_state_residual(&w, &params, &f).unwrap();
        assert!(r.l2 < 1e-10 && r.balance_defect < 1e-10, "{r:?}");

        let r0 = steady_state_residual(&SpectralField::zeros(g), &params, &f).unwrap();
        assert!((r0.l2 - f.norms().l2).abs() < 1e-12);

        // long run from the fixed point: balance residuals vanish
        let params = p(0.01, 0.1, 0.01, 2.0);
        let mut rec = BalanceRecorder::new(&f);
        integrate(&w, &params, &f, 10, &mut [&mut rec]).unwrap();
        assert!(energy_balance_residual(&rec.samples, &params).unwrap() < 1e-6);
        assert!(enstrophy_balance_residual(&rec.samples, &params).unwrap() < 1e-6);
    }

    #[test]
    fn l2_envelope_from_fixed_point_is_flat() {
        let g = GridSpec::new(32).unwrap();
        let f = ForcingSpec::SingleMode {
            k: [0, 1],
            amplitude: 0.5,
        }
        .build(&g)
        .unwrap();
        let gamma = 0.5;
        let params = p(0.0, gamma, 0.01, 3.0);
        let w = f.g_hat().scaled(1.0 / gamma);
        let mut rec = BalanceRecorder::new(&f);
        integrate(&w, &params, &f, 10, &mut [&mut rec]).unwrap();
        let limit = f.norms().l2 / gamma;
        for s in &rec.samples {
            assert!((s.l2 - limit).abs() < 1e-10 * limit);
        }
        let env = decay_envelope_check(&rec.samples, limit, f.norms().l2, gamma, EnvelopeNorm::L2);
        assert!(env.holds(), "{env:?}");
    }

    #[test]
    fn envelope_formula_value() {
        assert!((envelope_bound(2.0, 1.0, 0.0, 0.5) - (-1.0_f64).exp()).abs() < 1e-15);
        assert!((envelope_bound(2.0, 1.0, 0.0, 0.5) - 0.3679).abs() < 1e-4);
    }

    #[test]
    fn strongly_damped_run_approaches_steady_state() {
        let g = GridSpec::new(32).unwrap();
        let f = ForcingSpec::Kolmogorov {
            k_f: 2,
            amplitude: 1.0,
        }
        .build(&g)
        .unwrap();
        let w0 = initial::random_field(g, 5, 1, 4, 1.0);
        let mut last = f64::INFINITY;
        for horizon in [1.0, 2.0, 4.0] {
            let params = p(0.01, 2.0, 0.01, horizon);
            let end = integrate(&w0, &params, &f, 1000, &mut []).unwrap();
            let r = steady_state_residual(&end.omega, &params, &f).unwrap();
            assert!(r.l2 < last, "{} !< {last}", r.l2);
            last = r.l2;
        }
    }
}
