//! Integrating-factor RK4 for `∂t ω̂ = −(γ + ν|k|²) ω̂ − P(u·∇ω)^ + ĝ`.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use log::warn;

use super::forcing::Forcing;
use super::params::{cfl_limit, SolverParams};
use crate::error::{Error, Result};
use crate::spectral::{fft, Complex64, GridSpec, PhysicalField, SpectralField};

/// Coefficient size treated as divergence: beyond it the quadratic
/// diagnostics overflow even though the step itself is still finite.
pub const BLOW_UP_MAGNITUDE: f64 = 1e100;

/// Vorticity at one instant of a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryState {
    pub time: f64,
    pub omega: SpectralField,
    pub step_count: u64,
}

impl TrajectoryState {
    pub fn new(omega: SpectralField) -> Self {
        TrajectoryState {
            time: 0.0,
            omega,
            step_count: 0,
        }
    }
}

/// Receives snapshots during [`integrate`].
pub trait Observer {
    fn observe(&mut self, state: &TrajectoryState) -> Result<()>;
}

impl<F: FnMut(&TrajectoryState)> Observer for F {
    fn observe(&mut self, state: &TrajectoryState) -> Result<()> {
        self(state);
        Ok(())
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Per-grid tables for the advection term.
#[derive(Clone, Debug)]
struct AdvectionTables {
    grid: GridSpec,
    /// Derivative wavenumbers with the Nyquist entry dropped.
    kd: Vec<f64>,
    inv_k_sq: Vec<f64>,
    retained: Vec<bool>,
}

impl AdvectionTables {
    fn new(grid: GridSpec) -> Self {
        let n = grid.n();
        let kd: Vec<f64> = (0..n)
            .map(|i| {
                if grid.is_nyquist(i) {
                    0.0
                } else {
                    grid.wavenumber(i)
                }
            })
            .collect();
        let mut inv_k_sq = vec![0.0; grid.len()];
        let mut retained = vec![false; grid.len()];
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                let (k1, k2) = (grid.wavenumber(i), grid.wavenumber(j));
                let k_sq = k1 * k1 + k2 * k2;
                if idx != 0 {
                    inv_k_sq[idx] = 1.0 / k_sq;
                }
                retained[idx] = grid.retained(i, j);
            }
        }
        AdvectionTables {
            grid,
            kd,
            inv_k_sq,
            retained,
        }
    }

    /// Dealiased `(u·∇ω)^` of a dealiased input; returns the coefficient
    /// array and the grid maximum of `|u|`.
    fn advection(&self, omega: &[Complex64]) -> (Vec<Complex64>, f64) {
        let n = self.grid.n();
        let i_unit = Complex64::new(0.0, 1.0);
        let mut vel = vec![ZERO; omega.len()];
        let mut grad = vec![ZERO; omega.len()];
        for i in 0..n {
            let k1 = self.kd[i];
            for j in 0..n {
                let idx = i * n + j;
                if !self.retained[idx] {
                    continue;
                }
                let w = omega[idx];
                let k2 = self.kd[j];
                let psi = w * self.inv_k_sq[idx];
                // û₁ + i û₂ and ∂₁ω̂ + i ∂₂ω̂, packed for one complex synthesis each
                let u1 = i_unit * k2 * psi;
                let u2 = -i_unit * k1 * psi;
                vel[idx] = u1 + i_unit * u2;
                grad[idx] = i_unit * k1 * w + i_unit * (i_unit * k2 * w);
            }
        }
        fft::inverse(&mut vel, n);
        fft::inverse(&mut grad, n);
        let mut max_sq = 0.0_f64;
        let mut prod: Vec<Complex64> = vel
            .iter()
            .zip(&grad)
            .map(|(u, g)| {
                max_sq = max_sq.max(u.norm_sqr());
                Complex64::new(u.re * g.re + u.im * g.im, 0.0)
            })
            .collect();
        fft::forward(&mut prod, n);
        for (c, &keep) in prod.iter_mut().zip(&self.retained) {
            if !keep {
                *c = ZERO;
            }
        }
        prod[0] = ZERO;
        (prod, max_sq.sqrt())
    }
}

/// Dealiased spectral representation of `u·∇ω` with `u` the Biot-Savart
/// velocity of `omega`, computed pseudo-spectrally.
pub fn nonlinear_term(omega: &SpectralField) -> Result<SpectralField> {
    crate::spectral::velocity_coeffs(omega)?;
    let tables = AdvectionTables::new(*omega.grid());
    let (coeffs, _) = tables.advection(omega.coeffs());
    Ok(SpectralField::from_vec_unchecked(*omega.grid(), coeffs))
}

/// Reusable stepper for one `(grid, params, forcing)` triple.
#[derive(Debug)]
pub struct Integrator {
    params: SolverParams,
    tables: AdvectionTables,
    g_hat: Vec<Complex64>,
    e_half: Vec<f64>,
    e_full: Vec<f64>,
    max_cfl: AtomicU64,
    cfl_warned: AtomicBool,
}

impl Integrator {
    pub fn new(grid: GridSpec, params: SolverParams, forcing: &Forcing) -> Result<Self> {
        params.validate()?;
        grid.check_same(forcing.g_hat().grid())?;
        let n = grid.n();
        let mut e_half = vec![0.0; grid.len()];
        let mut e_full = vec![0.0; grid.len()];
        for i in 0..n {
            for j in 0..n {
                let (k1, k2) = (grid.wavenumber(i), grid.wavenumber(j));
                let rate = params.linear_rate(k1 * k1 + k2 * k2);
                e_half[i * n + j] = (-rate * params.dt / 2.0).exp();
                e_full[i * n + j] = (-rate * params.dt).exp();
            }
        }
        Ok(Integrator {
            params,
            tables: AdvectionTables::new(grid),
            g_hat: forcing.g_hat().coeffs().to_vec(),
            e_half,
            e_full,
            max_cfl: AtomicU64::new(0f64.to_bits()),
            cfl_warned: AtomicBool::new(false),
        })
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn grid(&self) -> &GridSpec {
        &self.tables.grid
    }

    /// Largest `dt·max|u|/h` seen so far.
    pub fn max_cfl_number(&self) -> f64 {
        f64::from_bits(self.max_cfl.load(Ordering::Relaxed))
    }

    fn rhs(&self, omega: &[Complex64]) -> Vec<Complex64> {
        let (mut adv, speed) = self.tables.advection(omega);
        self.note_speed(speed);
        for (a, g) in adv.iter_mut().zip(&self.g_hat) {
            *a = g - *a;
        }
        adv
    }

    fn note_speed(&self, speed: f64) {
        let h = self.tables.grid.spacing();
        let cfl = self.params.dt * speed / h;
        let prev = f64::from_bits(self.max_cfl.load(Ordering::Relaxed));
        if cfl > prev {
            self.max_cfl.store(cfl.to_bits(), Ordering::Relaxed);
        }
        if self.params.dt > cfl_limit(h, speed) && !self.cfl_warned.swap(true, Ordering::Relaxed) {
            warn!(
                "dt = {} exceeds the advective CFL estimate {:.3e} (max|u| = {:.3e})",
                self.params.dt,
                cfl_limit(h, speed),
                speed
            );
        }
    }

    /// One integrating-factor RK4 step; the linear part is integrated
    /// exactly by `exp(−(γ + ν|k|²)dt)`.
    pub fn step(&self, state: &TrajectoryState) -> Result<TrajectoryState> {
        self.tables.grid.check_same(state.omega.grid())?;
        let dt = self.params.dt;
        let w = state.omega.coeffs();
        let (eh, ef) = (&self.e_half, &self.e_full);

        let a = self.rhs(w);
        let s1: Vec<Complex64> = (0..w.len())
            .map(|i| eh[i] * (w[i] + 0.5 * dt * a[i]))
            .collect();
        let b = self.rhs(&s1);
        let s2: Vec<Complex64> = (0..w.len())
            .map(|i| eh[i] * w[i] + 0.5 * dt * b[i])
            .collect();
        let c = self.rhs(&s2);
        let s3: Vec<Complex64> = (0..w.len())
            .map(|i| ef[i] * w[i] + dt * eh[i] * c[i])
            .collect();
        let d = self.rhs(&s3);

        let mut next: Vec<Complex64> = (0..w.len())
            .map(|i| ef[i] * w[i] + dt / 6.0 * (ef[i] * a[i] + 2.0 * eh[i] * (b[i] + c[i]) + d[i]))
            .collect();
        next[0] = ZERO;
        let step_count = state.step_count + 1;
        if next
            .iter()
            .any(|z| !(z.re.abs() < BLOW_UP_MAGNITUDE && z.im.abs() < BLOW_UP_MAGNITUDE))
        {
            return Err(Error::BlowUp {
                step: step_count,
                time: state.time + dt,
            });
        }
        Ok(TrajectoryState {
            time: state.time + dt,
            omega: SpectralField::from_vec_unchecked(self.tables.grid, next),
            step_count,
        })
    }

    /// Advance from `state` for `steps` steps, calling observers at every
    /// `stride`-th step (including the first state).
    pub fn run(
        &self,
        state: TrajectoryState,
        steps: u64,
        stride: u64,
        observers: &mut [&mut dyn Observer],
    ) -> Result<TrajectoryState> {
        let stride = stride.max(1);
        let start = state.step_count;
        let t_start = state.time;
        let mut state = state;
        for o in observers.iter_mut() {
            o.observe(&state)?;
        }
        for s in 1..=steps {
            let mut next = self.step(&state)?;
            // time from the step index, so long runs do not accumulate drift
            next.time = t_start + s as f64 * self.params.dt;
            next.step_count = start + s;
            state = next;
            if s % stride == 0 {
                for o in observers.iter_mut() {
                    o.observe(&state)?;
                }
            }
        }
        Ok(state)
    }
}

/// One step of the damped driven vorticity equation.
pub fn step(
    state: &TrajectoryState,
    params: &SolverParams,
    forcing: &Forcing,
) -> Result<TrajectoryState> {
    Integrator::new(*state.omega.grid(), *params, forcing)?.step(state)
}

/// Integrate from `t = 0` to `t0 + horizon`, invoking observers every
/// `stride` steps.
pub fn integrate(
    omega0: &SpectralField,
    params: &SolverParams,
    forcing: &Forcing,
    stride: u64,
    observers: &mut [&mut dyn Observer],
) -> Result<TrajectoryState> {
    let mut omega = omega0.clone();
    omega.remove_mean();
    let integrator = Integrator::new(*omega.grid(), *params, forcing)?;
    integrator.run(
        TrajectoryState::new(omega),
        params.total_steps(),
        stride,
        observers,
    )
}

/// Physical-space vorticity of a state.
pub fn vorticity(state: &TrajectoryState) -> PhysicalField {
    state.omega.synthesize()
}
