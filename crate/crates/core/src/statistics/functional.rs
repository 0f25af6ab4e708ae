//! Cylindrical test functionals `Ψ(ω) = ψ(⟨ω,w₁⟩, …, ⟨ω,w_m⟩)`.

use serde::{Deserialize, Serialize};

use crate::dynamics::Forcing;
use crate::error::{Error, Result};
use crate::mollify::{alpha_eps, mollify, MollifierKernel, RenormalizerBeta};
use crate::spectral::{
    biot_savart, dealias, gradient, inner_product, laplacian, vector_inner_product, GridSpec,
    PhysicalField, SpectralField,
};

/// The outer function `ψ : ℝ^m → ℝ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "psi", rename_all = "snake_case")]
pub enum OuterFunction {
    /// `Σ c_j a_j`
    Linear { c: Vec<f64> },
    /// `½ Σ a_j²`
    HalfSumSquares,
    /// `cos(Σ c_j a_j)`, the real part of the character `exp(i c·a)`.
    CosineCharacter { c: Vec<f64> },
}

impl OuterFunction {
    pub fn value(&self, a: &[f64]) -> f64 {
        match self {
            OuterFunction::Linear { c } => c.iter().zip(a).map(|(c, a)| c * a).sum(),
            OuterFunction::HalfSumSquares => 0.5 * a.iter().map(|a| a * a).sum::<f64>(),
            OuterFunction::CosineCharacter { c } => {
                c.iter().zip(a).map(|(c, a)| c * a).sum::<f64>().cos()
            }
        }
    }

    pub fn gradient(&self, a: &[f64]) -> Vec<f64> {
        match self {
            OuterFunction::Linear { c } => c.clone(),
            OuterFunction::HalfSumSquares => a.to_vec(),
            OuterFunction::CosineCharacter { c } => {
                let s = -c.iter().zip(a).map(|(c, a)| c * a).sum::<f64>().sin();
                c.iter().map(|c| c * s).collect()
            }
        }
    }

    fn arity(&self) -> Option<usize> {
        match self {
            OuterFunction::Linear { c } | OuterFunction::CosineCharacter { c } => Some(c.len()),
            OuterFunction::HalfSumSquares => None,
        }
    }
}

/// `Ψ_I` acts on `ω` directly; `Ψ_ε` acts on `α_ε(ω) = J_ε β(J_ε ω)`.
#[derive(Clone, Debug)]
pub enum FunctionalKind {
    TypeI,
    TypeEps {
        kernel: MollifierKernel,
        beta: RenormalizerBeta,
    },
}

/// A named test functional with its outer function and test fields.
#[derive(Clone, Debug)]
pub struct TestFunctional {
    name: String,
    kind: FunctionalKind,
    psi: OuterFunction,
    w: Vec<PhysicalField>,
}

/// `Ψ` and the three terms of its time derivative at one state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct FunctionalRates {
    pub psi: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl FunctionalRates {
    /// `F1 + νF2 + F3 = −dΨ/dt`.
    pub fn rate(&self, nu: f64) -> f64 {
        self.f1 + nu * self.f2 + self.f3
    }
}

impl TestFunctional {
    pub fn new(
        name: impl Into<String>,
        kind: FunctionalKind,
        psi: OuterFunction,
        w: Vec<PhysicalField>,
    ) -> Result<Self> {
        let name = name.into();
        if w.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "{name}: need at least one test field"
            )));
        }
        if let Some(m) = psi.arity() {
            if m != w.len() {
                return Err(Error::InvalidParameter(format!(
                    "{name}: outer function takes {m} arguments but {} test fields given",
                    w.len()
                )));
            }
        }
        for wj in &w[1..] {
            w[0].grid().check_same(wj.grid())?;
        }
        if let FunctionalKind::TypeEps { kernel, .. } = &kind {
            kernel.grid().check_same(w[0].grid())?;
        }
        Ok(TestFunctional { name, kind, psi, w })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &FunctionalKind {
        &self.kind
    }

    pub fn outer(&self) -> &OuterFunction {
        &self.psi
    }

    pub fn test_fields(&self) -> &[PhysicalField] {
        &self.w
    }

    fn arguments(&self, omega: &PhysicalField) -> Result<Vec<f64>> {
        let target = match &self.kind {
            FunctionalKind::TypeI => omega.clone(),
            FunctionalKind::TypeEps { kernel, beta } => alpha_eps(omega, kernel, beta)?,
        };
        self.w.iter().map(|wj| inner_product(&target, wj)).collect()
    }

    /// `Ψ(ω)`.
    pub fn eval(&self, omega: &PhysicalField) -> Result<f64> {
        Ok(self.psi.value(&self.arguments(omega)?))
    }

    /// The Riesz representative `Ψ′(ω)`: `Σ ∂_jψ w_j` for `Ψ_I` and
    /// `Σ ∂_jψ J_ε(β′(J_ε ω) J_ε w_j)` for `Ψ_ε`.
    pub fn gradient(&self, omega: &PhysicalField) -> Result<PhysicalField> {
        let dpsi = self.psi.gradient(&self.arguments(omega)?);
        let grid = *omega.grid();
        let mut out = PhysicalField::zeros(grid);
        match &self.kind {
            FunctionalKind::TypeI => {
                for (d, wj) in dpsi.iter().zip(&self.w) {
                    out = out.add(&wj.scaled(*d))?;
                }
            }
            FunctionalKind::TypeEps { kernel, beta } => {
                let slope = mollify(omega, kernel)?.map(|y| beta.derivative(y));
                for (d, wj) in dpsi.iter().zip(&self.w) {
                    let inner = slope.mul(&mollify(wj, kernel)?)?;
                    out = out.add(&mollify(&inner, kernel)?.scaled(*d))?;
                }
            }
        }
        Ok(out)
    }

    /// `Ψ`, `F1 = ⟨Ψ′, γω − g⟩`, `F2 = ⟨∇Ψ′, ∇ω⟩`, `F3 = −⟨u·∇Ψ′, ω⟩`, with
    /// `Ψ′` projected onto the dealiased band so every product is exact.
    pub fn rates(
        &self,
        omega: &SpectralField,
        gamma: f64,
        forcing: &Forcing,
    ) -> Result<FunctionalRates> {
        let omega_phys = omega.synthesize();
        let psi = self.eval(&omega_phys)?;
        let pp_hat = dealias(&self.gradient(&omega_phys)?.to_spectral());
        let pp = pp_hat.synthesize();
        let source = omega_phys.scaled(gamma).sub(forcing.g())?;
        let grad_pp = gradient(&pp_hat);
        let grad_w = gradient(omega);
        let u = biot_savart(omega)?;
        let transport = u.u1.mul(&grad_pp.u1)?.add(&u.u2.mul(&grad_pp.u2)?)?;
        Ok(FunctionalRates {
            psi,
            f1: inner_product(&pp, &source)?,
            f2: vector_inner_product(&grad_pp, &grad_w)?,
            f3: -inner_product(&transport, &omega_phys)?,
        })
    }

    /// `F2` in the form `−⟨ΔΨ′, ω⟩`.
    pub fn f2_laplacian_form(&self, omega: &SpectralField) -> Result<f64> {
        let omega_phys = omega.synthesize();
        let pp_hat = dealias(&self.gradient(&omega_phys)?.to_spectral());
        Ok(-inner_product(
            &laplacian(&pp_hat).synthesize(),
            &omega_phys,
        )?)
    }
}

/// `Ψ(ω)`.
pub fn eval_psi(spec: &TestFunctional, omega: &PhysicalField) -> Result<f64> {
    spec.eval(omega)
}

/// `Ψ′(ω)`.
pub fn eval_psi_prime(spec: &TestFunctional, omega: &PhysicalField) -> Result<PhysicalField> {
    spec.gradient(omega)
}

pub fn f1(
    spec: &TestFunctional,
    omega: &SpectralField,
    gamma: f64,
    forcing: &Forcing,
) -> Result<f64> {
    Ok(spec.rates(omega, gamma, forcing)?.f1)
}

pub fn f2(spec: &TestFunctional, omega: &SpectralField, forcing: &Forcing) -> Result<f64> {
    Ok(spec.rates(omega, 0.0, forcing)?.f2)
}

pub fn f3(spec: &TestFunctional, omega: &SpectralField, forcing: &Forcing) -> Result<f64> {
    Ok(spec.rates(omega, 0.0, forcing)?.f3)
}

/// Orthonormal low harmonics `cos(k·x)`, `sin(k·x)` for `k` in
/// `(1,0), (0,1), (1,1), (1,−1), (2,0), …`, first `m` of them.
pub fn low_harmonic_basis(grid: GridSpec, m: usize) -> Vec<PhysicalField> {
    const MODES: [(i64, i64); 6] = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 0), (0, 2)];
    let unit = grid.wavenumber_unit();
    let norm = (grid.area() / 2.0).sqrt();
    let mut out = Vec::with_capacity(m);
    'outer: for (a, b) in MODES {
        for phase in [0.0, -std::f64::consts::FRAC_PI_2] {
            if out.len() == m {
                break 'outer;
            }
            let (k1, k2) = (a as f64 * unit, b as f64 * unit);
            out.push(PhysicalField::from_fn(grid, |x, y| {
                (k1 * x + k2 * y + phase).cos() / norm
            }));
        }
    }
    out
}

/// Names of the built-in catalog entries.
pub const CATALOG_NAMES: [&str; 6] = [
    "linear_I",
    "half_sum_squares_I",
    "cosine_character_I",
    "linear_eps",
    "half_sum_squares_eps",
    "cosine_character_eps",
];

/// Number of test fields used by catalog functionals.
pub const CATALOG_FIELDS: usize = 4;

/// Build a catalog functional by name. `_eps` entries need a kernel and β.
pub fn catalog_functional(
    name: &str,
    grid: GridSpec,
    eps: Option<(&MollifierKernel, &RenormalizerBeta)>,
) -> Result<TestFunctional> {
    let (outer, suffix) = name
        .rsplit_once('_')
        .ok_or_else(|| Error::Config(format!("unknown functional {name:?}")))?;
    let m = CATALOG_FIELDS;
    let psi = match outer {
        "linear" => OuterFunction::Linear {
            c: (0..m).map(|j| 1.0 / (j + 1) as f64).collect(),
        },
        "half_sum_squares" => OuterFunction::HalfSumSquares,
        "cosine_character" => OuterFunction::CosineCharacter {
            c: (0..m).map(|j| 0.3 - 0.1 * j as f64).collect(),
        },
        _ => return Err(Error::Config(format!("unknown functional {name:?}"))),
    };
    let kind = match suffix {
        "I" => FunctionalKind::TypeI,
        "eps" => {
            let (kernel, beta) = eps.ok_or_else(|| {
                Error::Config(format!("functional {name:?} needs a mollifier width"))
            })?;
            FunctionalKind::TypeEps {
                kernel: kernel.clone(),
                beta: *beta,
            }
        }
        _ => return Err(Error::Config(format!("unknown functional {name:?}"))),
    };
    TestFunctional::new(name, kind, psi, low_harmonic_basis(grid, m))
}
