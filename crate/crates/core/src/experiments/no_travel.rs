//! Localization experiment: how much enstrophy reaches the far field.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::{create_dir, fmt_f64, write_text};
use crate::dynamics::{periodic_distance, InitialSpec, Integrator, TrajectoryState};
use crate::error::{Error, Result};
use crate::spectral::quadrature::pairwise_sum_by;
use crate::spectral::{inner_product, GridSpec, PhysicalField};

/// Radii as fractions of the domain length.
pub const RADIUS_FRACTIONS: [f64; 3] = [0.125, 0.25, 0.375];

/// Smallest domain for which the experiment is meaningful.
pub const MIN_DOMAIN_LENGTH: f64 = 8.0 * std::f64::consts::PI;

pub const CUTOFF_PROFILE: &str =
    "phi(s) = S(2s - 1) with S(x) = e^(-1/x) / (e^(-1/x) + e^(-1/(1-x))) on (0,1); \
     phi = 0 for s <= 1/2 and 1 for s >= 1; s = periodic distance from the domain center / R";

/// `φ(s)`: 0 for `s ≤ ½`, 1 for `s ≥ 1`, C^∞ in between.
pub fn cutoff_phi(s: f64) -> f64 {
    let x = 2.0 * s - 1.0;
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Weight field `φ(|x − c|/R)` on the grid, with `c` the domain center.
pub fn cutoff_field(grid: GridSpec, radius: f64) -> PhysicalField {
    let c = grid.domain_length / 2.0;
    PhysicalField::from_fn(grid, |x, y| {
        cutoff_phi(periodic_distance(&grid, x, y, [c, c]) / radius)
    })
}

/// `Y_R = ∫ φ(|x − c|/R) |ω|² dx`.
pub fn y_r(omega: &PhysicalField, weight: &PhysicalField) -> f64 {
    let (w, phi) = (omega.values(), weight.values());
    pairwise_sum_by(w.len(), |i| phi[i] * w[i] * w[i]) * omega.grid().cell_area()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoTravelResult {
    pub radii: Vec<f64>,
    pub cutoff_profile: String,
    pub times: Vec<f64>,
    pub enstrophy: Vec<f64>,
    /// `Y_R(t)` per radius.
    pub y: Vec<Vec<f64>>,
    /// `max_t Y_R(t)/‖ω(t)‖²` per radius.
    pub max_fraction: Vec<f64>,
    pub threshold: f64,
}

impl NoTravelResult {
    pub fn passed(&self) -> bool {
        self.max_fraction
            .last()
            .is_some_and(|f| *f <= self.threshold)
    }

    fn column(&self, i: usize) -> String {
        format!("y_r_{}L", RADIUS_FRACTIONS[i])
    }

    pub fn write(&self, dir: &std::path::Path) -> Result<()> {
        create_dir(dir)?;
        let path = dir.join("no_travel.csv");
        let mut w = csv::Writer::from_path(&path)?;
        let mut header = vec!["t".to_string(), "enstrophy".to_string()];
        header.extend((0..self.radii.len()).map(|i| self.column(i)));
        w.write_record(&header)?;
        for (k, t) in self.times.iter().enumerate() {
            let mut rec = vec![fmt_f64(*t), fmt_f64(self.enstrophy[k])];
            rec.extend(self.y.iter().map(|series| fmt_f64(series[k])));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        #[derive(Serialize)]
        struct Summary<'a> {
            radii: &'a [f64],
            max_fraction: &'a [f64],
            threshold: f64,
            passed: bool,
            cutoff_profile: &'a str,
        }
        let text = toml::to_string(&Summary {
            radii: &self.radii,
            max_fraction: &self.max_fraction,
            threshold: self.threshold,
            passed: self.passed(),
            cutoff_profile: &self.cutoff_profile,
        })
        .map_err(|e| Error::Config(e.to_string()))?;
        write_text(&dir.join("no_travel.toml"), &text)
    }
}

/// Track `Y_R(t)` for `R ∈ {L/8, L/4, 3L/8}` over `[0, horizon]` with
/// localized forcing and initial data.
pub fn no_travel_experiment(cfg: &ExperimentConfig) -> Result<NoTravelResult> {
    let grid = cfg.grid;
    if grid.domain_length < MIN_DOMAIN_LENGTH * (1.0 - 1e-12) {
        return Err(Error::Config(format!(
            "no-travel needs domain_length >= 8 pi, got {}",
            grid.domain_length
        )));
    }
    if !cfg.forcing.is_localized() {
        return Err(Error::Config(
            "no-travel needs a localized_bump or zero forcing".into(),
        ));
    }
    if !matches!(
        cfg.initial,
        InitialSpec::LocalizedDipole { .. } | InitialSpec::Zero
    ) {
        return Err(Error::Config(
            "no-travel needs localized_dipole or zero initial data".into(),
        ));
    }
    let threshold = cfg.no_travel.unwrap_or_default().threshold;
    let forcing = cfg.forcing()?;
    let params = cfg.params(cfg.solver.nu, 0.0)?;
    let radii: Vec<f64> = RADIUS_FRACTIONS
        .iter()
        .map(|f| f * grid.domain_length)
        .collect();
    let weights: Vec<PhysicalField> = radii.iter().map(|r| cutoff_field(grid, *r)).collect();

    let mut times = Vec::new();
    let mut enstrophy = Vec::new();
    let mut y: Vec<Vec<f64>> = vec![Vec::new(); radii.len()];
    let mut observer = |state: &TrajectoryState| {
        let omega = state.omega.synthesize();
        let z = inner_product(&omega, &omega).unwrap_or(f64::NAN);
        times.push(state.time);
        enstrophy.push(z);
        for (series, w) in y.iter_mut().zip(&weights) {
            series.push(y_r(&omega, w));
        }
    };
    let integrator = Integrator::new(grid, params, &forcing)?;
    integrator.run(
        TrajectoryState::new(cfg.initial()?),
        params.total_steps(),
        cfg.observer_stride,
        &mut [&mut observer],
    )?;
    let max_fraction = y
        .iter()
        .map(|series| {
            series
                .iter()
                .zip(&enstrophy)
                .filter(|(_, z)| **z > 0.0)
                .map(|(yr, z)| yr / z)
                .fold(0.0_f64, f64::max)
        })
        .collect();
    Ok(NoTravelResult {
        radii,
        cutoff_profile: CUTOFF_PROFILE.to_string(),
        times,
        enstrophy,
        y,
        max_fraction,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_profile_limits() {
        assert_eq!(cutoff_phi(0.0), 0.0);
        assert_eq!(cutoff_phi(0.5), 0.0);
        assert_eq!(cutoff_phi(1.0), 1.0);
        assert_eq!(cutoff_phi(3.0), 1.0);
        assert!((cutoff_phi(0.75) - 0.5).abs() < 1e-15);
        let mut last = 0.0;
        for i in 0..=100 {
            let v = cutoff_phi(0.5 + 0.005 * i as f64);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn y_r_is_bounded_by_enstrophy() {
        let g = GridSpec::with_length(32, MIN_DOMAIN_LENGTH).unwrap();
        let omega = crate::dynamics::initial::random_field(g, 1, 1, 4, 2.0).synthesize();
        let z = crate::spectral::inner_product(&omega, &omega).unwrap();
        let mut last = f64::INFINITY;
        for r in RADIUS_FRACTIONS {
            let yr = y_r(&omega, &cutoff_field(g, r * g.domain_length));
            assert!(yr <= z && yr >= 0.0);
            assert!(yr <= last);
            last = yr;
        }
    }
}
