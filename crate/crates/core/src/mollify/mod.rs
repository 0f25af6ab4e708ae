//! Mollification, renormalization and commutator fluxes.

mod balance;
mod beta;
mod commutator;
mod kernel;

pub use balance::{
    mollified_enstrophy_balance, MollifiedBalanceRecorder, MollifiedBalanceReport, MollifiedSample,
};
pub use beta::RenormalizerBeta;
pub use commutator::{
    commutator_r, commutator_rho, diperna_lions_defect, product_defect, vector_l1, CommutatorFlux,
    DiPernaLionsDefect,
};
pub use kernel::{increment_norm, mollify, shift, KernelNode, MollifierKernel, MIN_CELLS};

use crate::error::Result;
use crate::spectral::PhysicalField;

/// `α_ε(ω) = J_ε β(J_ε ω)`.
pub fn alpha_eps(
    omega: &PhysicalField,
    kernel: &MollifierKernel,
    beta: &RenormalizerBeta,
) -> Result<PhysicalField> {
    let inner = mollify(omega, kernel)?;
    mollify(&inner.map(|y| beta.value(y)), kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::initial::random_field;
    use crate::spectral::GridSpec;

    #[test]
    fn alpha_of_zero_is_zero() {
        let g = GridSpec::new(16).unwrap();
        let k = MollifierKernel::new(g, 4.0 * g.spacing()).unwrap();
        let b = RenormalizerBeta::new(1.0).unwrap();
        let a = alpha_eps(&PhysicalField::zeros(g), &k, &b).unwrap();
        assert!(a.max_abs() < 1e-16);
    }

    #[test]
    fn alpha_is_bounded_by_sup_beta() {
        let g = GridSpec::new(32).unwrap();
        let k = MollifierKernel::new(g, 5.0 * g.spacing()).unwrap();
        let b = RenormalizerBeta::new(0.3).unwrap();
        let w = random_field(g, 3, 1, 8, 20.0).synthesize();
        let a = alpha_eps(&w, &k, &b).unwrap();
        assert!(a.max_abs() <= b.sup() + 1e-12);
    }

    #[test]
    fn alpha_is_double_mollification_on_identity_range() {
        let g = GridSpec::new(32).unwrap();
        let k = MollifierKernel::new(g, 5.0 * g.spacing()).unwrap();
        let w = random_field(g, 8, 1, 6, 0.5).synthesize();
        let b = RenormalizerBeta::new(10.0 * w.max_abs()).unwrap();
        let a = alpha_eps(&w, &k, &b).unwrap();
        let jj = mollify(&mollify(&w, &k).unwrap(), &k).unwrap();
        assert!(a.sub(&jj).unwrap().max_abs() < 1e-10);
    }
}
