//! Commutator fluxes `r_ε`, `ρ_ε` and the mollified-equation defect.

use super::kernel::MollifierKernel;
use crate::dynamics::{nonlinear_term, Forcing};
use crate::error::Result;
use crate::par;
use crate::spectral::{
    biot_savart, dealias, gradient, norms, PhysicalField, SpectralField, VectorField,
};

/// `r_ε(u, b) = Σ_q c_q (u(x−εz_q) − u(x)) (b(x−εz_q) − b(x))`, evaluated
/// node by node.
pub fn commutator_r(
    u: &VectorField,
    b: &PhysicalField,
    kernel: &MollifierKernel,
) -> Result<VectorField> {
    let grid = *kernel.grid();
    grid.check_same(u.grid())?;
    grid.check_same(b.grid())?;
    let n = grid.n();
    let (u1, u2, bv) = (u.u1.values(), u.u2.values(), b.values());
    // rows of (r₁, r₂) interleaved so both components fill in one pass
    let mut out = vec![0.0; 2 * grid.len()];
    par::for_each_chunk_mut(&mut out, 2 * n, |i, row| {
        for q in kernel.nodes() {
            let si = (i as i64 - q.offset.0).rem_euclid(n as i64) as usize;
            for j in 0..n {
                let sj = (j as i64 - q.offset.1).rem_euclid(n as i64) as usize;
                let (here, there) = (i * n + j, si * n + sj);
                let db = bv[there] - bv[here];
                row[2 * j] += q.weight * (u1[there] - u1[here]) * db;
                row[2 * j + 1] += q.weight * (u2[there] - u2[here]) * db;
            }
        }
    });
    let (r1, r2): (Vec<f64>, Vec<f64>) = out.chunks_exact(2).map(|p| (p[0], p[1])).unzip();
    VectorField::new(PhysicalField::new(grid, r1)?, PhysicalField::new(grid, r2)?)
}

/// Both sides of `(u ⊗ b)_ε − u_ε ⊗ b_ε = ρ_ε(u, b)`.
#[derive(Clone, Debug)]
pub struct CommutatorFlux {
    /// `ρ_ε = r_ε − (u − u_ε)(b − b_ε)`
    pub rho: VectorField,
    /// `(u b)_ε − u_ε b_ε`, from mollified products
    pub product_defect: VectorField,
    pub r: VectorField,
}

impl CommutatorFlux {
    /// Largest pointwise difference between the two sides.
    pub fn identity_defect(&self) -> f64 {
        let d1 = self.rho.u1.sub(&self.product_defect.u1).expect("same grid");
        let d2 = self.rho.u2.sub(&self.product_defect.u2).expect("same grid");
        d1.max_abs().max(d2.max_abs())
    }
}

fn mollify_field(f: &PhysicalField, kernel: &MollifierKernel) -> Result<PhysicalField> {
    super::kernel::mollify(f, kernel)
}

/// `(u b)_ε − u_ε b_ε` per component, through the Fourier multiplier.
pub fn product_defect(
    u: &VectorField,
    b: &PhysicalField,
    kernel: &MollifierKernel,
) -> Result<VectorField> {
    let b_eps = mollify_field(b, kernel)?;
    let comp = |ui: &PhysicalField| -> Result<PhysicalField> {
        let prod_eps = mollify_field(&ui.mul(b)?, kernel)?;
        let ui_eps = mollify_field(ui, kernel)?;
        prod_eps.sub(&ui_eps.mul(&b_eps)?)
    };
    VectorField::new(comp(&u.u1)?, comp(&u.u2)?)
}

/// `ρ_ε(u, b)` together with the other side of the flux identity.
pub fn commutator_rho(
    u: &VectorField,
    b: &PhysicalField,
    kernel: &MollifierKernel,
) -> Result<CommutatorFlux> {
    let r = commutator_r(u, b, kernel)?;
    let b_eps = mollify_field(b, kernel)?;
    let db = b.sub(&b_eps)?;
    let comp = |ri: &PhysicalField, ui: &PhysicalField| -> Result<PhysicalField> {
        let du = ui.sub(&mollify_field(ui, kernel)?)?;
        ri.sub(&du.mul(&db)?)
    };
    let rho = VectorField::new(comp(&r.u1, &u.u1)?, comp(&r.u2, &u.u2)?)?;
    Ok(CommutatorFlux {
        rho,
        product_defect: product_defect(u, b, kernel)?,
        r,
    })
}

/// `‖v‖_{L¹} = ∫ |v₁| + |v₂|`.
pub fn vector_l1(v: &VectorField) -> f64 {
    norms(&v.u1).l1 + norms(&v.u2).l1
}

/// Defect of the mollified stationary equation.
#[derive(Clone, Debug)]
pub struct DiPernaLionsDefect {
    /// `q_ε = u·∇(J_ε ω) + γ J_ε ω − J_ε g`
    pub q: PhysicalField,
    pub q_l1: f64,
    /// `[u·∇, J_ε] ω = u·∇(J_ε ω) − J_ε(u·∇ω)`
    pub commutator: PhysicalField,
    pub commutator_l1: f64,
}

fn advect(u: &VectorField, f: &SpectralField) -> Result<SpectralField> {
    let grad = gradient(f);
    let prod = u.u1.mul(&grad.u1)?.add(&u.u2.mul(&grad.u2)?)?;
    Ok(dealias(&prod.to_spectral()))
}

/// `q_ε` and its commutator part for a (nearly) stationary `omega`.
pub fn diperna_lions_defect(
    omega: &SpectralField,
    forcing: &Forcing,
    gamma: f64,
    kernel: &MollifierKernel,
) -> Result<DiPernaLionsDefect> {
    let u = biot_savart(omega)?;
    let omega_eps = kernel.apply_spectral(omega)?;
    let transport_eps = advect(&u, &omega_eps)?;
    let g_eps = kernel.apply_spectral(forcing.g_hat())?;
    let q = transport_eps
        .add(&omega_eps.scaled(gamma))?
        .sub(&g_eps)?
        .synthesize();
    let commutator = transport_eps
        .sub(&kernel.apply_spectral(&nonlinear_term(omega)?)?)?
        .synthesize();
    Ok(DiPernaLionsDefect {
        q_l1: norms(&q).l1,
        q,
        commutator_l1: norms(&commutator).l1,
        commutator,
    })
}
