//! Periodic-grid fields, transforms and spectral calculus.

pub mod fft;
mod field;
mod grid;
mod ops;
pub mod quadrature;

pub use field::{Norms, PhysicalField, SpectralField, VectorField};
pub use grid::GridSpec;
pub use ops::{
    biot_savart, curl, dealias, derivative, divergence, forward_transform, gradient, inner_product,
    inverse_transform, laplacian, norms, spectral_inner_product, spectral_quadratic,
    vector_inner_product, velocity_coeffs, HERMITIAN_TOLERANCE,
};
pub use rustfft::num_complex::Complex64;
