use rustfft::num_complex::Complex64;

use crate::dynamics::bump;
use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{fft, GridSpec, PhysicalField, SpectralField};

/// Minimum kernel radius in grid cells.
pub const MIN_CELLS: f64 = 4.0;

/// One quadrature node of the scaled kernel: a grid offset and its weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelNode {
    /// Grid offset `(a, b)`, so that `εz = (a h, b h)`.
    pub offset: (i64, i64),
    /// Unit-disk coordinate `z`.
    pub z: [f64; 2],
    pub weight: f64,
}

/// The mollifier `j_ε` sampled on the grid nodes inside `|x| < ε`.
///
/// The weights are `j(z_q)` renormalized to sum to one, so the discrete
/// kernel is nonnegative, even and has unit mass. `J_ε` acts as a real,
/// even Fourier multiplier, which makes it exactly self-adjoint and an
/// average (hence a contraction in every `L^p`).
#[derive(Clone, Debug)]
pub struct MollifierKernel {
    grid: GridSpec,
    epsilon: f64,
    nodes: Vec<KernelNode>,
    multiplier: Vec<f64>,
}

impl MollifierKernel {
    pub fn new(grid: GridSpec, epsilon: f64) -> Result<Self> {
        grid.validate()?;
        let h = grid.spacing();
        let min_epsilon = MIN_CELLS * h;
        if epsilon.is_nan() || epsilon < min_epsilon * (1.0 - 1e-12) {
            return Err(Error::UnresolvedKernel {
                epsilon,
                min_epsilon,
            });
        }
        if epsilon >= grid.domain_length / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "mollifier width {epsilon} must be below L/2"
            )));
        }
        let reach = (epsilon / h).ceil() as i64;
        let mut nodes = Vec::new();
        for a in -reach..=reach {
            for b in -reach..=reach {
                let z = [a as f64 * h / epsilon, b as f64 * h / epsilon];
                let w = bump(z[0].hypot(z[1]));
                if w > 0.0 {
                    nodes.push(KernelNode {
                        offset: (a, b),
                        z,
                        weight: w,
                    });
                }
            }
        }
        let total: f64 = nodes.iter().map(|q| q.weight).sum();
        for q in nodes.iter_mut() {
            q.weight /= total;
        }

        let n = grid.n();
        let mut table = vec![Complex64::new(0.0, 0.0); grid.len()];
        for q in &nodes {
            let idx = grid.index_of_mode(q.offset.0) * n + grid.index_of_mode(q.offset.1);
            table[idx] += q.weight;
        }
        fft::forward(&mut table, n);
        let scale = grid.len() as f64;
        let multiplier = table.iter().map(|c| c.re * scale).collect();
        Ok(MollifierKernel {
            grid,
            epsilon,
            nodes,
            multiplier,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn nodes(&self) -> &[KernelNode] {
        &self.nodes
    }

    /// Fourier multiplier of `J_ε`, in the coefficient layout of the grid.
    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    /// `Σ_q c_q cos(k·εz_q)`: the factor by which `J_ε` scales a harmonic of
    /// physical wavenumber `k`, evaluated by quadrature over the nodes.
    pub fn harmonic_gain(&self, k1: f64, k2: f64) -> f64 {
        self.nodes
            .iter()
            .map(|q| q.weight * (self.epsilon * (k1 * q.z[0] + k2 * q.z[1])).cos())
            .sum()
    }

    /// `J_ε` on coefficients.
    pub fn apply_spectral(&self, f: &SpectralField) -> Result<SpectralField> {
        self.grid.check_same(f.grid())?;
        let coeffs = f
            .coeffs()
            .iter()
            .zip(&self.multiplier)
            .map(|(c, m)| c * m)
            .collect();
        Ok(SpectralField::from_vec_unchecked(self.grid, coeffs))
    }

    /// `Σ_q c_q f(x − εz_q)` evaluated node by node in physical space.
    pub fn convolve_direct(&self, f: &PhysicalField) -> Result<PhysicalField> {
        self.grid.check_same(f.grid())?;
        let n = self.grid.n();
        let src = f.values();
        let mut out = vec![0.0; self.grid.len()];
        par::for_each_chunk_mut(&mut out, n, |i, row| {
            for q in &self.nodes {
                let si = (i as i64 - q.offset.0).rem_euclid(n as i64) as usize;
                for (j, v) in row.iter_mut().enumerate() {
                    let sj = (j as i64 - q.offset.1).rem_euclid(n as i64) as usize;
                    *v += q.weight * src[si * n + sj];
                }
            }
        });
        Ok(PhysicalField::from_vec_unchecked(self.grid, out))
    }
}

/// `J_ε f = j_ε ⋆ f`.
pub fn mollify(f: &PhysicalField, kernel: &MollifierKernel) -> Result<PhysicalField> {
    Ok(kernel.apply_spectral(&f.to_spectral())?.synthesize())
}

/// `f(x − s)` for an arbitrary offset `s`, by a Fourier phase shift (exact
/// for band-limited fields).
pub fn shift(f: &PhysicalField, s: [f64; 2]) -> PhysicalField {
    let g = *f.grid();
    let shifted = f.to_spectral().map_modes(|k1, k2, c| {
        let phase = -(k1 * s[0] + k2 * s[1]);
        c * Complex64::new(phase.cos(), phase.sin())
    });
    let mut data = shifted.coeffs().to_vec();
    fft::inverse(&mut data, g.n());
    PhysicalField::new(g, data.into_iter().map(|c| c.re).collect())
        .expect("shift of a finite field is finite")
}

/// `‖δ_s f‖₂` with `(δ_s f)(x) = f(x − s) − f(x)`.
pub fn increment_norm(f: &PhysicalField, s: [f64; 2]) -> f64 {
    let d = shift(f, s).sub(f).expect("same grid");
    crate::spectral::norms(&d).l2
}
