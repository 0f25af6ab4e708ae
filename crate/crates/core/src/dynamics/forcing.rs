use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    biot_savart, dealias, derivative, norms, GridSpec, Norms, PhysicalField, SpectralField,
    VectorField,
};

/// Vorticity source description. Wavenumbers are integer modes in units of
/// `2π/L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForcingSpec {
    /// `g = 0`.
    Zero,
    /// `g = amplitude · cos(k·x)`.
    SingleMode { k: [i64; 2], amplitude: f64 },
    /// `g = amplitude · cos(k_f x₂)`.
    Kolmogorov { k_f: i64, amplitude: f64 },
    /// `g = ∇⊥·f` with `f = amplitude · b(x) e₂` and `b` the C^∞ bump of the
    /// given radius (peak value 1).
    LocalizedBump {
        center: [f64; 2],
        radius: f64,
        amplitude: f64,
    },
    /// Plain-text grid of `N²` values, row-major along `x₁`.
    FromFile { path: PathBuf },
}

/// A built vorticity source on a concrete grid.
#[derive(Clone, Debug)]
pub struct Forcing {
    spec: ForcingSpec,
    g_hat: SpectralField,
    g: PhysicalField,
    force_solenoidal: VectorField,
    force: Option<VectorField>,
}

/// Standard bump `exp(−1/(1−r²))` on `r < 1`.
pub fn bump(r: f64) -> f64 {
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

/// Minimum-image displacement on a periodic interval of length `l`.
#[inline]
pub fn min_image(d: f64, l: f64) -> f64 {
    d - l * (d / l).round()
}

/// Periodic distance from `center`.
pub fn periodic_distance(grid: &GridSpec, x1: f64, x2: f64, center: [f64; 2]) -> f64 {
    let l = grid.domain_length;
    min_image(x1 - center[0], l).hypot(min_image(x2 - center[1], l))
}

fn read_grid_file(grid: &GridSpec, path: &PathBuf) -> Result<PhysicalField> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let values = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| Error::Config(format!("{}: bad value {s:?}: {e}", path.display())))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != grid.len() {
        return Err(Error::Config(format!(
            "{}: expected {} values for N = {}, found {}",
            path.display(),
            grid.len(),
            grid.n(),
            values.len()
        )));
    }
    PhysicalField::new(*grid, values)
}

impl ForcingSpec {
    pub fn build(&self, grid: &GridSpec) -> Result<Forcing> {
        grid.validate()?;
        let mut force = None;
        let raw: SpectralField = match self {
            ForcingSpec::Zero => SpectralField::zeros(*grid),
            ForcingSpec::SingleMode { k, amplitude } => {
                let u = grid.wavenumber_unit();
                let (k1, k2) = (k[0] as f64 * u, k[1] as f64 * u);
                PhysicalField::from_fn(*grid, |x, y| amplitude * (k1 * x + k2 * y).cos())
                    .to_spectral()
            }
            ForcingSpec::Kolmogorov { k_f, amplitude } => {
                let k = *k_f as f64 * grid.wavenumber_unit();
                PhysicalField::from_fn(*grid, |_, y| amplitude * (k * y).cos()).to_spectral()
            }
            ForcingSpec::LocalizedBump {
                center,
                radius,
                amplitude,
            } => {
                if !(*radius > 0.0 && *radius < grid.domain_length / 2.0) {
                    return Err(Error::Config(format!(
                        "bump radius {radius} must lie in (0, L/2)"
                    )));
                }
                let peak = bump(0.0);
                let f2 = PhysicalField::from_fn(*grid, |x, y| {
                    amplitude * bump(periodic_distance(grid, x, y, *center) / radius) / peak
                });
                let f1 = PhysicalField::zeros(*grid);
                // g = ∂₁f₂ − ∂₂f₁
                let g = derivative(&f2.to_spectral(), 0).sub(&derivative(&f1.to_spectral(), 1))?;
                force = Some(VectorField::new(f1, f2)?);
                g
            }
            ForcingSpec::FromFile { path } => read_grid_file(grid, path)?.to_spectral(),
        };
        let mut g_hat = dealias(&raw);
        g_hat.remove_mean();
        let g = g_hat.synthesize();
        let force_solenoidal = biot_savart(&g_hat)?;
        Ok(Forcing {
            spec: self.clone(),
            g_hat,
            g,
            force_solenoidal,
            force,
        })
    }

    /// Whether the source is spatially localized (required by the no-travel
    /// experiment).
    pub fn is_localized(&self) -> bool {
        matches!(self, ForcingSpec::LocalizedBump { .. } | ForcingSpec::Zero)
    }
}

impl Forcing {
    pub fn spec(&self) -> &ForcingSpec {
        &self.spec
    }

    /// Dealiased, mean-free coefficients of `g`.
    pub fn g_hat(&self) -> &SpectralField {
        &self.g_hat
    }

    pub fn g(&self) -> &PhysicalField {
        &self.g
    }

    /// Divergence-free part of the body force, `K ⋆ g`; it is the part of
    /// `f` that pairs with the velocity in the energy balance.
    pub fn force_solenoidal(&self) -> &VectorField {
        &self.force_solenoidal
    }

    /// The compactly supported body force, when the source was built from one.
    pub fn force(&self) -> Option<&VectorField> {
        self.force.as_ref()
    }

    pub fn norms(&self) -> Norms {
        norms(&self.g)
    }

    pub fn is_zero(&self) -> bool {
        self.g_hat.coeffs().iter().all(|c| c.norm() == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::{curl, inner_product};

    #[test]
    fn kolmogorov_is_mean_free_cosine() {
        let g = GridSpec::new(32).unwrap();
        let f = ForcingSpec::Kolmogorov {
            k_f: 4,
            amplitude: 1.0,
        }
        .build(&g)
        .unwrap();
        assert!(f.g_hat().is_mean_free());
        let expect = PhysicalField::from_fn(g, |_, y| (4.0 * y).cos());
        assert!(f.g().sub(&expect).unwrap().max_abs() < 1e-13);
        assert!((f.norms().l2 - (2.0 * PI * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bump_force_has_curl_g_and_compact_support() {
        let g = GridSpec::new(64).unwrap();
        let spec = ForcingSpec::LocalizedBump {
            center: [PI, PI],
            radius: 1.0,
            amplitude: 2.0,
        };
        let f = spec.build(&g).unwrap();
        let force = f.force().unwrap();
        let outside = PhysicalField::from_fn(g, |x, y| {
            if periodic_distance(&g, x, y, [PI, PI]) >= 1.0 {
                1.0
            } else {
                0.0
            }
        });
        assert_eq!(force.u2.mul(&outside).unwrap().max_abs(), 0.0);
        // the solenoidal part has the same curl as the full force
        let c = curl(f.force_solenoidal());
        let d = c.sub(f.g_hat()).unwrap();
        assert!(d.coeffs().iter().all(|z| z.norm() < 1e-12));
        assert!(f.g().mean().abs() < 1e-14);
        assert!(inner_product(f.g(), f.g()).unwrap() > 0.0);
    }

    #[test]
    fn file_forcing_round_trip() {
        let g = GridSpec::new(8).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        let field = PhysicalField::from_fn(g, |x, y| (x + y).sin());
        let text: Vec<String> = field.values().iter().map(|v| format!("{v:.17e}")).collect();
        std::fs::write(&path, text.join("\n")).unwrap();
        let f = ForcingSpec::FromFile { path: path.clone() }
            .build(&g)
            .unwrap();
        assert!(f.g().sub(&field).unwrap().max_abs() < 1e-13);

        std::fs::write(&path, "1 2 3").unwrap();
        assert!(ForcingSpec::FromFile { path }.build(&g).is_err());
    }

    #[test]
    fn spec_parses_from_toml() {
        let s: ForcingSpec =
            toml::from_str("kind = \"kolmogorov\"\nk_f = 4\namplitude = 1.0").unwrap();
        assert_eq!(
            s,
            ForcingSpec::Kolmogorov {
                k_f: 4,
                amplitude: 1.0
            }
        );
    }
}
