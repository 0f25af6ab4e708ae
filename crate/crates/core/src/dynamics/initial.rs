//! Initial vorticity fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::forcing::{bump, min_image};
use crate::error::Result;
use crate::spectral::{dealias, Complex64, GridSpec, PhysicalField, SpectralField};

/// Initial-condition description used by experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    Zero,
    /// Random phases in the integer-mode annulus `[k_min, k_max]`, scaled to
    /// the given `L²` norm. The seed comes from the experiment config.
    Random {
        k_min: i64,
        k_max: i64,
        l2_norm: f64,
    },
    SingleMode {
        k: [i64; 2],
        amplitude: f64,
    },
    /// `amplitude · ∂₁b` for the bump `b` of the given radius: compactly
    /// supported and mean-free.
    LocalizedDipole {
        center: [f64; 2],
        radius: f64,
        amplitude: f64,
    },
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Random {
            k_min: 1,
            k_max: 6,
            l2_norm: 1.0,
        }
    }
}

impl InitialSpec {
    pub fn build(&self, grid: &GridSpec, seed: u64) -> Result<SpectralField> {
        grid.validate()?;
        Ok(match self {
            InitialSpec::Zero => SpectralField::zeros(*grid),
            InitialSpec::Random {
                k_min,
                k_max,
                l2_norm,
            } => random_field(*grid, seed, *k_min, *k_max, *l2_norm),
            InitialSpec::SingleMode { k, amplitude } => single_mode(*grid, *k, *amplitude),
            InitialSpec::LocalizedDipole {
                center,
                radius,
                amplitude,
            } => localized_dipole(*grid, *center, *radius, *amplitude),
        })
    }
}

/// `amplitude · cos(k·x)` with integer mode `k`.
pub fn single_mode(grid: GridSpec, k: [i64; 2], amplitude: f64) -> SpectralField {
    let u = grid.wavenumber_unit();
    let (k1, k2) = (k[0] as f64 * u, k[1] as f64 * u);
    let mut s =
        PhysicalField::from_fn(grid, |x, y| amplitude * (k1 * x + k2 * y).cos()).to_spectral();
    s.remove_mean();
    s
}

/// Seeded random field with energy in integer modes `k_min ≤ |m| ≤ k_max`,
/// dealiased, mean-free, scaled to `‖ω‖₂ = l2_norm`.
pub fn random_field(
    grid: GridSpec,
    seed: u64,
    k_min: i64,
    k_max: i64,
    l2_norm: f64,
) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    for i in 0..n {
        for j in 0..n {
            let (m1, m2) = (grid.mode(i), grid.mode(j));
            let m = ((m1 * m1 + m2 * m2) as f64).sqrt();
            let re: f64 = rng.random_range(-1.0..1.0);
            let im: f64 = rng.random_range(-1.0..1.0);
            if m >= k_min as f64 && m <= k_max as f64 && !grid.is_nyquist(i) && !grid.is_nyquist(j)
            {
                c[i * n + j] = Complex64::new(re, im) / m;
            }
        }
    }
    // Hermitian projection
    let mut sym = c.clone();
    for i in 0..n {
        for j in 0..n {
            let (ni, nj) = ((n - i) % n, (n - j) % n);
            sym[i * n + j] = 0.5 * (c[i * n + j] + c[ni * n + nj].conj());
        }
    }
    let mut s = dealias(&SpectralField::from_vec_unchecked(grid, sym));
    s.remove_mean();
    let norm = crate::spectral::spectral_quadratic(&s, |_, _| 1.0).sqrt();
    if norm > 0.0 {
        s = s.scaled(l2_norm / norm);
    }
    s
}

/// `amplitude · ∂₁ b(|x − center|/radius)`, evaluated analytically so the
/// samples vanish exactly outside the support.
pub fn localized_dipole(
    grid: GridSpec,
    center: [f64; 2],
    radius: f64,
    amplitude: f64,
) -> SpectralField {
    let l = grid.domain_length;
    let f = PhysicalField::from_fn(grid, |x, y| {
        let d1 = min_image(x - center[0], l);
        let d2 = min_image(y - center[1], l);
        let r = d1.hypot(d2) / radius;
        if r >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - r * r;
        amplitude * bump(r) * (-2.0 * d1 / (radius * radius)) / (s * s)
    });
    let mut s = f.to_spectral();
    s.remove_mean();
    s
}
