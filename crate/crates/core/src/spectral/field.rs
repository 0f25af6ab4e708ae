use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::GridSpec;
use super::quadrature::pairwise_sum_by;
use crate::error::{Error, Result};

/// Point samples of a real scalar on the grid, stored row-major with the
/// first index along `x₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    values: Vec<f64>,
}

/// Fourier coefficients of a real scalar, in the same index layout as
/// [`PhysicalField`] with modes ordered as [`GridSpec::mode`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

/// Two-component field, e.g. the Biot-Savart velocity or a gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub u1: PhysicalField,
    pub u2: PhysicalField,
}

/// Quadrature `L¹`, `L²` norms and the exact grid maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl PhysicalField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(PhysicalField { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        PhysicalField { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        PhysicalField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        PhysicalField {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Sample `f(x₁, x₂)` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..n {
            let x1 = grid.coord(i);
            for j in 0..n {
                values.push(f(x1, grid.coord(j)));
            }
        }
        PhysicalField { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n() + j]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        PhysicalField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(PhysicalField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a * b)
    }

    /// Grid average `(1/N²) Σ f`.
    pub fn mean(&self) -> f64 {
        pairwise_sum_by(self.values.len(), |i| self.values[i]) / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Forward transform (unit-normalized).
    pub fn to_spectral(&self) -> SpectralField {
        let n = self.grid.n();
        let mut data: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fft::forward(&mut data, n);
        SpectralField {
            grid: self.grid,
            coeffs: data,
        }
    }
}

impl SpectralField {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        if let Some(index) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub(crate) fn from_vec_unchecked(grid: GridSpec, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid, coeffs }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of integer mode `(m₁, m₂)`.
    pub fn coeff(&self, m1: i64, m2: i64) -> Complex64 {
        let n = self.grid.n();
        self.coeffs[self.grid.index_of_mode(m1) * n + self.grid.index_of_mode(m2)]
    }

    pub fn set_coeff(&mut self, m1: i64, m2: i64, c: Complex64) {
        let n = self.grid.n();
        let idx = self.grid.index_of_mode(m1) * n + self.grid.index_of_mode(m2);
        self.coeffs[idx] = c;
    }

    /// The mean mode `coeff(0, 0)`.
    #[inline]
    pub fn mean_coeff(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn is_mean_free(&self) -> bool {
        self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    /// Zero the mean mode exactly.
    pub fn remove_mean(&mut self) {
        self.coeffs[0] = Complex64::new(0.0, 0.0);
    }

    /// Largest `|c(k) − conj c(−k)|`, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..n {
            let ni = (n - i) % n;
            for j in 0..n {
                let nj = (n - j) % n;
                let d = (self.coeffs[i * n + j] - self.coeffs[ni * n + nj].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// Multiply every coefficient by `f(k₁, k₂)` evaluated at physical
    /// wavenumbers.
    pub fn map_modes(&self, f: impl Fn(f64, f64, Complex64) -> Complex64) -> Self {
        let g = self.grid;
        let n = g.n();
        let mut out = self.coeffs.clone();
        for i in 0..n {
            let k1 = g.wavenumber(i);
            for j in 0..n {
                let idx = i * n + j;
                out[idx] = f(k1, g.wavenumber(j), out[idx]);
            }
        }
        SpectralField {
            grid: g,
            coeffs: out,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Synthesis without the symmetry check; the caller guarantees the
    /// coefficients come from a real field.
    pub(crate) fn synthesize(&self) -> PhysicalField {
        let mut data = self.coeffs.clone();
        fft::inverse(&mut data, self.grid.n());
        PhysicalField {
            grid: self.grid,
            values: data.into_iter().map(|c| c.re).collect(),
        }
    }

    /// Synthesize two real fields with a single complex transform.
    pub(crate) fn synthesize_pair(a: &Self, b: &Self) -> (PhysicalField, PhysicalField) {
        debug_assert_eq!(a.grid, b.grid);
        let i = Complex64::new(0.0, 1.0);
        let mut data: Vec<Complex64> = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x + i * y)
            .collect();
        fft::inverse(&mut data, a.grid.n());
        let (re, im): (Vec<f64>, Vec<f64>) = data.into_iter().map(|c| (c.re, c.im)).unzip();
        (
            PhysicalField::from_vec_unchecked(a.grid, re),
            PhysicalField::from_vec_unchecked(a.grid, im),
        )
    }
}

impl VectorField {
    pub fn new(u1: PhysicalField, u2: PhysicalField) -> Result<Self> {
        u1.grid().check_same(u2.grid())?;
        Ok(VectorField { u1, u2 })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        VectorField {
            u1: PhysicalField::zeros(grid),
            u2: PhysicalField::zeros(grid),
        }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        self.u1.grid()
    }

    /// Pointwise `max |u|`.
    pub fn max_speed(&self) -> f64 {
        self.u1
            .values()
            .iter()
            .zip(self.u2.values())
            .fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// Pointwise magnitude `|u|`.
    pub fn magnitude(&self) -> PhysicalField {
        self.u1
            .zip_map(&self.u2, |a, b| a.hypot(b))
            .expect("components share a grid")
    }
}
