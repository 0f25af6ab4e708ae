use rustfft::num_complex::Complex64;

use super::field::{Norms, PhysicalField, SpectralField, VectorField};
use super::quadrature::pairwise_sum_by;
use crate::error::{Error, Result};

/// Inputs whose symmetry defect exceeds this are rejected by
/// [`inverse_transform`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Forward DFT, normalized so that `cos(k·x)` has coefficients `1/2` at `±k`.
pub fn forward_transform(f: &PhysicalField) -> Result<SpectralField> {
    if let Some(index) = f.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(f.to_spectral())
}

/// Inverse DFT; rejects coefficient arrays that do not describe a real field.
pub fn inverse_transform(f: &SpectralField) -> Result<PhysicalField> {
    let defect = f.hermitian_defect();
    if defect > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { defect });
    }
    Ok(f.synthesize())
}

/// Multiplier `i k` along `axis` (0 for `x₁`, 1 for `x₂`). The Nyquist line
/// is dropped because its derivative has no real-valued representation.
pub fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    let g = *f.grid();
    let n = g.n();
    let mut out = f.coeffs().to_vec();
    for i in 0..n {
        for j in 0..n {
            let idx = if axis == 0 { i } else { j };
            let k = if g.is_nyquist(idx) {
                0.0
            } else {
                g.wavenumber(idx)
            };
            out[i * n + j] *= Complex64::new(0.0, k);
        }
    }
    SpectralField::from_vec_unchecked(g, out)
}

/// Spectral gradient `(∂₁f, ∂₂f)` in physical space.
pub fn gradient(f: &SpectralField) -> VectorField {
    let d1 = derivative(f, 0);
    let d2 = derivative(f, 1);
    let (u1, u2) = SpectralField::synthesize_pair(&d1, &d2);
    VectorField { u1, u2 }
}

/// Multiplier `−|k|²`.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    f.map_modes(|k1, k2, c| -(k1 * k1 + k2 * k2) * c)
}

/// Velocity coefficients `û = i(k₂, −k₁) ω̂ / |k|²` with `û(0) = 0`.
pub fn velocity_coeffs(omega: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    let scale = omega.coeffs().iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    let mean = omega.mean_coeff().norm();
    if mean > 1e-12 * scale.max(f64::MIN_POSITIVE) && mean > 0.0 {
        return Err(Error::NonzeroMean { mean });
    }
    let g = *omega.grid();
    let n = g.n();
    let mut a = vec![Complex64::new(0.0, 0.0); g.len()];
    let mut b = vec![Complex64::new(0.0, 0.0); g.len()];
    for i in 0..n {
        let k1 = g.wavenumber(i);
        for j in 0..n {
            if i == 0 && j == 0 {
                continue;
            }
            let k2 = g.wavenumber(j);
            let w = omega.coeffs()[i * n + j] / (k1 * k1 + k2 * k2);
            let idx = i * n + j;
            if !g.is_nyquist(j) {
                a[idx] = Complex64::new(0.0, k2) * w;
            }
            if !g.is_nyquist(i) {
                b[idx] = Complex64::new(0.0, -k1) * w;
            }
        }
    }
    Ok((
        SpectralField::from_vec_unchecked(g, a),
        SpectralField::from_vec_unchecked(g, b),
    ))
}

/// Biot-Savart law on the torus: the divergence-free `u` with `∇⊥·u = ω`.
pub fn biot_savart(omega: &SpectralField) -> Result<VectorField> {
    let (a, b) = velocity_coeffs(omega)?;
    let (u1, u2) = SpectralField::synthesize_pair(&a, &b);
    Ok(VectorField { u1, u2 })
}

/// 2/3-rule truncation (or whatever fraction the grid carries).
pub fn dealias(f: &SpectralField) -> SpectralField {
    let g = *f.grid();
    let n = g.n();
    let mut out = f.coeffs().to_vec();
    for i in 0..n {
        for j in 0..n {
            if !g.retained(i, j) {
                out[i * n + j] = Complex64::new(0.0, 0.0);
            }
        }
    }
    SpectralField::from_vec_unchecked(g, out)
}

/// Spectral divergence of a vector field, `ik·û`.
pub fn divergence(u: &VectorField) -> SpectralField {
    let a = derivative(&u.u1.to_spectral(), 0);
    let b = derivative(&u.u2.to_spectral(), 1);
    a.add(&b).expect("components share a grid")
}

/// Scalar curl `∇⊥·u = ∂₁u₂ − ∂₂u₁`.
pub fn curl(u: &VectorField) -> SpectralField {
    let a = derivative(&u.u2.to_spectral(), 0);
    let b = derivative(&u.u1.to_spectral(), 1);
    a.sub(&b).expect("components share a grid")
}

/// `⟨a, b⟩ = Σ a·b·h²` with pairwise summation.
pub fn inner_product(a: &PhysicalField, b: &PhysicalField) -> Result<f64> {
    a.grid().check_same(b.grid())?;
    let (x, y) = (a.values(), b.values());
    Ok(pairwise_sum_by(x.len(), |i| x[i] * y[i]) * a.grid().cell_area())
}

/// `⟨u, v⟩` for vector fields.
pub fn vector_inner_product(u: &VectorField, v: &VectorField) -> Result<f64> {
    Ok(inner_product(&u.u1, &v.u1)? + inner_product(&u.u2, &v.u2)?)
}

/// Coefficient-space inner product `L² Σ Re(a conj b)` (Parseval).
pub fn spectral_inner_product(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    a.grid().check_same(b.grid())?;
    let (x, y) = (a.coeffs(), b.coeffs());
    Ok(pairwise_sum_by(x.len(), |i| (x[i] * y[i].conj()).re) * a.grid().area())
}

/// Weighted coefficient sum `L² Σ w(k)|c(k)|²`.
pub fn spectral_quadratic(f: &SpectralField, weight: impl Fn(f64, f64) -> f64 + Copy) -> f64 {
    let g = *f.grid();
    let n = g.n();
    let c = f.coeffs();
    pairwise_sum_by(c.len(), |idx| {
        let (i, j) = (idx / n, idx % n);
        weight(g.wavenumber(i), g.wavenumber(j)) * c[idx].norm_sqr()
    }) * g.area()
}

/// `L¹`, `L²` (quadrature) and `L^∞` (grid max) norms.
pub fn norms(f: &PhysicalField) -> Norms {
    let v = f.values();
    let h2 = f.grid().cell_area();
    Norms {
        l1: pairwise_sum_by(v.len(), |i| v[i].abs()) * h2,
        l2: (pairwise_sum_by(v.len(), |i| v[i] * v[i]) * h2).sqrt(),
        linf: f.max_abs(),
    }
}
