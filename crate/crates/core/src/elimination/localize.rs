//! Localization: peel four replicas so the remainder is the identity on a
//! neighbourhood of the zero set of `f`.
//!
//! In the section frame `S⁻¹GS = Id + f³ f_i·M` with `M = S^#·E·S` and
//! `E = (G − Id)/f⁴`. The divisible quad realizes this with frame parameters
//! `f·zⱼ`, i.e. replicas with `h = zⱼ`. The parameters are cut off by `χ`,
//! which is one on `Ω` and zero off `Ω̃`.

use serde::Serialize;

use super::frame::{replica_direct, replica_product};
use super::quad::eliminate_four_divisible_at;
use super::ElimError;
use crate::bundle::{NilpotentPair, Replica};
use crate::fields::{deviation_field, make_cutoff, vanish_order, MatrixField, Region, VanishReport};
use crate::linalg::{CMat, ElementaryKind};
use crate::scalar::C64;

#[derive(Debug, Clone)]
pub struct Localization {
    /// `U⁻(h₁)·U⁺(h₂)·U⁻(h₃)·U⁺(h₄)`, left to right.
    pub replicas: Vec<Replica>,
    /// `G′ = G·(U₁U₂U₃U₄)⁻¹`, exactly the identity on `omega`.
    pub remainder: MatrixField,
    pub omega: Region,
    pub omega_outer: Region,
    pub report: LocalizeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizeReport {
    /// `‖G′ − Id‖` on `Ω` before snapping to the identity.
    pub max_residual_on_omega: f64,
    /// Decay of `U₁U₂U₃U₄ − Id` against `f`, target order 4.
    pub product_divisibility: Option<VanishReport>,
}

/// Localizes `G` (home coordinates) near `{f = 0}` with `Ω = dilate(Z, r)`
/// and `Ω̃ = dilate(Z, 2r + 1)`.
///
/// `G` must be the identity on the zero set; samples where `G = Id` exactly
/// get `h = 0` exactly. `snap_tol` bounds the residual on `Ω` that may be
/// rounded to the identity.
pub fn localize_to_identity(
    g: &MatrixField,
    pair: &NilpotentPair,
    radius: usize,
    snap_tol: f64,
) -> Result<Localization, ElimError> {
    let domain = pair.f().domain();
    if g.domain() != domain {
        return Err(ElimError::Field(crate::fields::FieldError::DomainMismatch));
    }
    let n = domain.len();
    let zero_set = pair.zero_set();
    for idx in zero_set.indices() {
        if g.get(idx).dist_to_identity() > snap_tol {
            return Err(ElimError::Divisibility(format!(
                "G differs from Id by {:e} at sample {idx} where f = 0",
                g.get(idx).dist_to_identity()
            )));
        }
    }
    if zero_set.is_empty() {
        return Ok(Localization {
            replicas: Vec::new(),
            remainder: g.clone(),
            omega: Region::empty(n),
            omega_outer: Region::empty(n),
            report: LocalizeReport {
                max_residual_on_omega: 0.0,
                product_divisibility: None,
            },
        });
    }
    let omega = domain.dilate(&zero_set, radius);
    let omega_outer = domain.dilate(&zero_set, 2 * radius + 1);
    for idx in zero_set.indices() {
        if !omega.contains(idx) {
            return Err(ElimError::CoverDoesNotContainZeroSet { sample: idx });
        }
    }
    let chi = make_cutoff(domain, &omega, &omega_outer)?.complement();

    let tol = pair.zero_tol();
    let mut h = vec![vec![C64::new(0.0, 0.0); n]; 4];
    for idx in 0..n {
        let c = chi.get(idx);
        if c == 0.0 {
            continue;
        }
        let gm = g.get(idx);
        let f = pair.f().get(idx);
        if gm.is_identity() || f.norm() <= tol {
            continue;
        }
        let e = gm.minus_identity().scale(&(C64::new(1.0, 0.0) / (f * f * f * f)));
        let s = pair.s_at(idx);
        let m = s.adjugate().mul_ref(&e).mul_ref(s);
        let q = eliminate_four_divisible_at(&m, f, pair.f_i_at(idx))
            .map_err(|_| ElimError::PivotVanishes { sample: Some(idx) })?;
        for j in 0..4 {
            h[j][idx] = q.z[j] * c;
        }
    }
    let kinds = [
        ElementaryKind::Lower,
        ElementaryKind::Upper,
        ElementaryKind::Lower,
        ElementaryKind::Upper,
    ];
    let replicas: Vec<Replica> = kinds
        .iter()
        .zip(h)
        .map(|(&k, hv)| replica_direct(pair, k, hv))
        .collect();
    let v = replica_product(pair, &replicas);
    let mut worst = 0.0f64;
    let mut rem = Vec::with_capacity(n);
    for idx in 0..n {
        let vi = v.get(idx).inverse()?;
        let r = g.get(idx).mul_ref(&vi);
        if omega.contains(idx) {
            worst = worst.max(r.dist_to_identity());
            rem.push(CMat::identity());
        } else {
            rem.push(r);
        }
    }
    if worst > snap_tol {
        return Err(ElimError::Divisibility(format!(
            "remainder is {worst:e} away from Id on the localization region"
        )));
    }
    let band = 0.5 * pair.f().sup_norm();
    let product_divisibility = vanish_order(&deviation_field(&v), pair.f(), 4, band).ok();
    Ok(Localization {
        replicas,
        remainder: MatrixField::new(domain.clone(), rem)?,
        omega,
        omega_outer,
        report: LocalizeReport {
            max_residual_on_omega: worst,
            product_divisibility,
        },
    })
}
