//! Four-factor elimination `A = L(z₁)·U(z₂)·L(z₃)·U(z₄)` and its variants.
//!
//! Writing out the product gives `a = 1 + z₂z₃`, `b = a z₄ + z₂`,
//! `c = a z₁ + z₃`, with `d` forced by `det = 1`. Every variant picks
//! `z₂, z₃` with `z₂z₃ = a − 1` and solves the other two linearly.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::ElimError;
use crate::fields::{MatrixField, ScalarField};
use crate::linalg::{lower, upper, CMat, ElementaryFactor};
use crate::scalar::C64;

/// Parameters of `L(z₁)·U(z₂)·L(z₃)·U(z₄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliminationQuad {
    pub z: [C64; 4],
}

impl EliminationQuad {
    pub fn zero() -> Self {
        EliminationQuad { z: [C64::zero(); 4] }
    }

    pub fn is_zero(&self) -> bool {
        self.z.iter().all(|z| z.is_zero())
    }

    pub fn factors(&self) -> [ElementaryFactor<C64>; 4] {
        [
            ElementaryFactor::lower(self.z[0]),
            ElementaryFactor::upper(self.z[1]),
            ElementaryFactor::lower(self.z[2]),
            ElementaryFactor::upper(self.z[3]),
        ]
    }

    pub fn product(&self) -> CMat {
        lower(self.z[0])
            .mul_ref(&upper(self.z[1]))
            .mul_ref(&lower(self.z[2]))
            .mul_ref(&upper(self.z[3]))
    }

    /// Multiplies every parameter by `s`.
    pub fn scaled(&self, s: C64) -> Self {
        EliminationQuad {
            z: self.z.map(|z| z * s),
        }
    }
}

/// `(√|w|, w/√|w|)`, continuous at `w = 0` with value `(0, 0)`.
fn split_product(w: C64) -> (C64, C64) {
    if w.is_zero() {
        return (C64::zero(), C64::zero());
    }
    let r = w.norm().sqrt();
    (C64::new(r, 0.0), w / r)
}

/// Solves `A = L(z₁)U(z₂)L(z₃)U(z₄)` for `det A = 1`, `|a| ≥ δ`.
///
/// `A = Id` returns the exact zero quad.
pub fn eliminate_four(a: &CMat, delta: f64, det_tol: f64) -> Result<EliminationQuad, ElimError> {
    let det_err = (a.det() - C64::new(1.0, 0.0)).norm();
    if !(det_err <= det_tol) {
        return Err(ElimError::NotSpecial { det_error: det_err });
    }
    let p = a.a11;
    if !(p.norm() >= delta) {
        return Err(ElimError::SmallPivot { pivot: p.norm(), delta });
    }
    let (z2, z3) = split_product(p - C64::new(1.0, 0.0));
    let z1 = (a.a21 - z3) / p;
    let z4 = (a.a12 - z2) / p;
    Ok(EliminationQuad { z: [z1, z2, z3, z4] })
}

/// Divisible variant at one sample: with `M = [[a,b],[c,d]]` returns `z` with
/// `L(f z₁)U(f z₂)L(f z₃)U(f z₄) = Id + f³ f_i M` whenever the right side has
/// determinant one. All `zⱼ` vanish where `f = 0` or `M = 0`.
pub fn eliminate_four_divisible_at(m: &CMat, f: C64, f_i: C64) -> Result<EliminationQuad, ElimError> {
    let w = m.a11 * f_i * f;
    let pivot = C64::new(1.0, 0.0) + f * f * w;
    if pivot.is_zero() || !pivot.is_finite() {
        return Err(ElimError::PivotVanishes { sample: None });
    }
    let (z2, z3) = split_product(w);
    let f2fi = f * f * f_i;
    let z1 = (f2fi * m.a21 - z3) / pivot;
    let z4 = (f2fi * m.a12 - z2) / pivot;
    Ok(EliminationQuad { z: [z1, z2, z3, z4] })
}

/// Field version of [`eliminate_four_divisible_at`], one quad per sample.
pub fn eliminate_four_divisible(
    m: &MatrixField,
    f: &ScalarField,
    f_i: &ScalarField,
) -> Result<Vec<EliminationQuad>, ElimError> {
    if m.domain() != f.domain() || f.domain() != f_i.domain() {
        return Err(ElimError::Field(crate::fields::FieldError::DomainMismatch));
    }
    (0..m.len())
        .map(|idx| {
            eliminate_four_divisible_at(m.get(idx), f.get(idx), f_i.get(idx))
                .map_err(|_| ElimError::PivotVanishes { sample: Some(idx) })
        })
        .collect()
}

/// Interpolating quad for `diag(λ, 1/λ)`; `λ = 1` gives the zero quad.
pub fn whitehead_diag(lambda: C64) -> Result<EliminationQuad, ElimError> {
    if lambda.is_zero() || !lambda.is_finite() {
        return Err(ElimError::ZeroEigenvalue);
    }
    let (z2, z3) = split_product(lambda - C64::new(1.0, 0.0));
    if z2.is_zero() {
        return Ok(EliminationQuad::zero());
    }
    let z1 = -z3 / lambda;
    let z4 = -z2 / lambda;
    Ok(EliminationQuad { z: [z1, z2, z3, z4] })
}

/// Ring-generic Whitehead quad `(−1/λ, λ−1, 1, 1/λ−1)`. It does not
/// interpolate: `λ = 1` gives `(−1, 0, 1, 0)`.
pub fn whitehead_standard(lambda: C64) -> Result<EliminationQuad, ElimError> {
    if lambda.is_zero() || !lambda.is_finite() {
        return Err(ElimError::ZeroEigenvalue);
    }
    let one = C64::new(1.0, 0.0);
    Ok(EliminationQuad {
        z: [-one / lambda, lambda - one, one, one / lambda - one],
    })
}

/// The variant whose first parameter is `(1−λ)/√|λ−1|`, without the `1/λ`.
/// Kept to exhibit its `(2,1)` residual `−(λ−1)²/√|λ−1|`.
pub fn whitehead_uncorrected(lambda: C64) -> Result<EliminationQuad, ElimError> {
    let mut q = whitehead_diag(lambda)?;
    q.z[0] *= lambda;
    Ok(q)
}
