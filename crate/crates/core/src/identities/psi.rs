//! The alternating product `ψ(z) = U⁻(z₁)·U⁺(z₂)⋯` and the boundary
//! variables of a fibre.

use serde::Serialize;

use super::qmatrix::q_expand;
use super::IdentityError;
use crate::bundle::{NilpotentPair, Replica, Sign};
use crate::elimination::replica_product;
use crate::fields::{FieldError, MatrixField, Polynomial, ScalarField};
use crate::linalg::{lower, upper, CMat};
use crate::scalar::C64;

/// Parameters of a word whose product is the identity.
pub const PADDING_WORD: [f64; 4] = [1.0, 0.0, -1.0, 0.0];

fn check_domains(z: &[ScalarField], pair: &NilpotentPair) -> Result<(), IdentityError> {
    if z.is_empty() || z.len() % 2 == 1 {
        return Err(IdentityError::OddLength(z.len()));
    }
    if z.iter().any(|zi| zi.domain() != pair.f().domain()) {
        return Err(FieldError::DomainMismatch.into());
    }
    Ok(())
}

fn replicas(z: &[ScalarField], pair: &NilpotentPair) -> Vec<Replica> {
    z.iter()
        .enumerate()
        .map(|(i, h)| {
            let sign = if i % 2 == 0 { Sign::Minus } else { Sign::Plus };
            Replica::new(&pair.id, sign, h.clone())
        })
        .collect()
}

pub fn psi_eval(z: &[ScalarField], pair: &NilpotentPair) -> Result<MatrixField, IdentityError> {
    check_domains(z, pair)?;
    Ok(replica_product(pair, &replicas(z, pair)))
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberReport {
    pub max_residual: f64,
    /// Samples where every middle variable vanishes.
    pub singular_samples: usize,
    pub samples: usize,
}

impl FiberReport {
    pub fn avoids_singular_set(&self) -> bool {
        self.singular_samples == 0
    }
}

/// `‖ψ(z) − G‖` pointwise and membership in the singular set
/// `z₂ = … = z_{2n−1} = 0`.
pub fn fiber_check(g: &MatrixField, z: &[ScalarField], pair: &NilpotentPair, zero_tol: f64) -> Result<FiberReport, IdentityError> {
    let psi = psi_eval(z, pair)?;
    if g.domain() != psi.domain() {
        return Err(FieldError::DomainMismatch.into());
    }
    let mids = &z[1..z.len() - 1];
    let singular = (0..g.len())
        .filter(|&idx| mids.iter().all(|m| m.get(idx).norm() <= zero_tol))
        .count();
    Ok(FiberReport {
        max_residual: psi.sup_dist(g),
        singular_samples: singular,
        samples: g.len(),
    })
}

#[derive(Debug, Clone)]
pub struct BoundarySolution {
    pub z1: ScalarField,
    pub z2n: ScalarField,
    /// `max |Q₁₁ − (1 + f²a)|`.
    pub residual_eq1: f64,
    /// `max |ψ₂₂ − (1 + f⁴bc)/(1 + f²a)|`: the fourth equation, which follows
    /// from the other three and `det = 1`.
    pub residual_eq4: f64,
}

/// Solves for `z₁` and `z_{2n}` given the middle variables, for a target that
/// reads `Id + f²·[[a, b], [c, ·]]` in the section frame.
///
/// `ψ = L(f z₁)·Q·U(f z_{2n})` with `Q = Q^{n−1}`, so
/// `z₁ = (f c − Q₂₁/f)/(1 + f²a)` and `z_{2n} = (f b − Q₁₂/f)/(1 + f²a)`.
pub fn solve_boundary_vars(
    z_mid: &[ScalarField],
    a: &ScalarField,
    b: &ScalarField,
    c: &ScalarField,
    f: &ScalarField,
    pivot_tol: f64,
) -> Result<BoundarySolution, IdentityError> {
    if z_mid.len() % 2 == 1 {
        return Err(IdentityError::OddLength(z_mid.len()));
    }
    let n = z_mid.len() / 2 + 1;
    let domain = f.domain();
    if [a, b, c].iter().any(|s| s.domain() != domain) || z_mid.iter().any(|s| s.domain() != domain) {
        return Err(FieldError::DomainMismatch.into());
    }

    let (q11, p12, p21) = if n >= 2 {
        let q = q_expand(n - 1)?;
        let fv = Polynomial::var("f");
        let p12 = q.m.a12.divide_exact(&fv, 1)?.align_to(&q.vars);
        let p21 = q.m.a21.divide_exact(&fv, 1)?.align_to(&q.vars);
        (Some(q.m.a11), Some(p12), Some(p21))
    } else {
        (None, None, None)
    };

    let len = f.len();
    let mut z1 = Vec::with_capacity(len);
    let mut z2n = Vec::with_capacity(len);
    let mut r1: f64 = 0.0;
    let mut r4: f64 = 0.0;
    for idx in 0..len {
        let fv = f.get(idx);
        let mut point: Vec<C64> = z_mid.iter().map(|z| z.get(idx)).collect();
        point.push(fv);
        let (q11v, p12v, p21v) = match (&q11, &p12, &p21) {
            (Some(q11), Some(p12), Some(p21)) => (q11.evaluate(&point)?, p12.evaluate(&point)?, p21.evaluate(&point)?),
            _ => (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
        };
        let f2 = fv * fv;
        let pivot = C64::new(1.0, 0.0) + f2 * a.get(idx);
        if pivot.norm() <= pivot_tol {
            return Err(IdentityError::PivotVanishes { sample: idx });
        }
        let x = (fv * c.get(idx) - p21v) / pivot;
        let y = (fv * b.get(idx) - p12v) / pivot;
        z1.push(x);
        z2n.push(y);

        let q = CMat::new(q11v, fv * p12v, fv * p21v, q22_at(z_mid, idx, fv, n));
        let psi = lower(fv * x).mul_ref(&q).mul_ref(&upper(fv * y));
        r1 = r1.max((q11v - pivot).norm());
        let target22 = (C64::new(1.0, 0.0) + f2 * f2 * b.get(idx) * c.get(idx)) / pivot;
        r4 = r4.max((psi.a22 - target22).norm());
    }
    Ok(BoundarySolution {
        z1: ScalarField::new(domain.clone(), z1)?,
        z2n: ScalarField::new(domain.clone(), z2n)?,
        residual_eq1: r1,
        residual_eq4: r4,
    })
}

/// `Q₂₂` at one sample, from the literal elementary product.
fn q22_at(z_mid: &[ScalarField], idx: usize, f: C64, n: usize) -> C64 {
    let mut m = CMat::identity();
    for i in 0..n - 1 {
        m = m
            .mul_ref(&upper(f * z_mid[2 * i].get(idx)))
            .mul_ref(&lower(f * z_mid[2 * i + 1].get(idx)));
    }
    m.a22
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{build_pair, ChartBundle, PairOptions, SectionPair};
    use crate::fields::GridDomain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn trivial_pair(d: &GridDomain) -> NilpotentPair {
        let b = ChartBundle::trivial(d);
        let s = SectionPair::single(MatrixField::identity(d));
        let f = ScalarField::from_real_fn(d, |p| 0.5 + p[0]);
        build_pair("p", &b, &s, &f, &PairOptions::default()).unwrap()
    }

    fn constant(d: &GridDomain, v: f64) -> ScalarField {
        ScalarField::constant(d, C64::new(v, 0.0))
    }

    #[test]
    fn zero_parameters_give_identity() {
        let d = GridDomain::interval(0.0, 1.0, 11).unwrap();
        let pair = trivial_pair(&d);
        let z = vec![ScalarField::zeros(&d); 6];
        assert_eq!(psi_eval(&z, &pair).unwrap().sup_dist_to_identity(), 0.0);
        assert!(matches!(psi_eval(&z[..3], &pair), Err(IdentityError::OddLength(3))));
    }

    #[test]
    fn padding_word_is_identity_exactly() {
        let d = GridDomain::interval(0.0, 1.0, 11).unwrap();
        let pair = trivial_pair(&d);
        let pad: Vec<ScalarField> = PADDING_WORD.iter().map(|&v| constant(&d, v)).collect();
        assert!(psi_eval(&pad, &pair).unwrap().sup_dist_to_identity() <= 1e-15);
        let word = lower(1.0f64).mul_ref(&upper(0.0)).mul_ref(&lower(-1.0)).mul_ref(&upper(0.0));
        assert!(word.is_identity());

        let z: Vec<ScalarField> = (0..4).map(|i| ScalarField::from_real_fn(&d, |p| p[0] * i as f64 - 0.3)).collect();
        let base = psi_eval(&z, &pair).unwrap();
        let mut padded = z.clone();
        padded.extend(pad);
        assert!(psi_eval(&padded, &pair).unwrap().sup_dist(&base) <= 1e-15);
    }

    #[test]
    fn fiber_check_flags_singular_samples() {
        let d = GridDomain::interval(0.0, 1.0, 11).unwrap();
        let pair = trivial_pair(&d);
        let pad: Vec<ScalarField> = PADDING_WORD.iter().map(|&v| constant(&d, v)).collect();
        let r = fiber_check(&MatrixField::identity(&d), &pad, &pair, 1e-14).unwrap();
        assert!(r.max_residual <= 1e-15);
        assert!(r.avoids_singular_set());
        let zeros = vec![ScalarField::zeros(&d); 4];
        let r = fiber_check(&MatrixField::identity(&d), &zeros, &pair, 1e-14).unwrap();
        assert_eq!(r.singular_samples, 11);
    }

    #[test]
    fn boundary_vars_trivial_case() {
        let d = GridDomain::interval(0.0, 1.0, 5).unwrap();
        let z = ScalarField::zeros(&d);
        let f = ScalarField::from_real_fn(&d, |p| 0.5 + p[0]);
        let sol = solve_boundary_vars(&[z.clone(), z.clone()], &z, &z, &z, &f, 1e-12).unwrap();
        assert_eq!(sol.z1.sup_norm(), 0.0);
        assert_eq!(sol.z2n.sup_norm(), 0.0);
    }

    #[test]
    fn boundary_vars_roundtrip_through_psi() {
        let d = GridDomain::interval(0.0, 1.0, 21).unwrap();
        let pair = trivial_pair(&d);
        let f = pair.f().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=4 {
            let z: Vec<ScalarField> = (0..2 * n)
                .map(|_| {
                    let vals = (0..d.len())
                        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                        .collect();
                    ScalarField::new(d.clone(), vals).unwrap()
                })
                .collect();
            let g = psi_eval(&z, &pair).unwrap();
            let f2 = f.mul(&f);
            let over_f2 = |s: ScalarField| s.zip_map(&f2, |v, w| v / w);
            let a = over_f2(g.entry(1, 1).map(|v| v - 1.0));
            let b = over_f2(g.entry(1, 2));
            let c = over_f2(g.entry(2, 1));
            let sol = solve_boundary_vars(&z[1..2 * n - 1], &a, &b, &c, &f, 1e-12).unwrap();
            let e1 = sol.z1.zip_map(&z[0], |u, v| u - v).sup_norm();
            let e2 = sol.z2n.zip_map(&z[2 * n - 1], |u, v| u - v).sup_norm();
            assert!(e1 <= 1e-10 && e2 <= 1e-10, "n = {n}: {e1} {e2}");
            assert!(sol.residual_eq1 <= 1e-12, "{}", sol.residual_eq1);
            assert!(sol.residual_eq4 <= 1e-10, "{}", sol.residual_eq4);
        }
    }

    #[test]
    fn vanishing_pivot_is_reported() {
        let d = GridDomain::interval(0.0, 1.0, 5).unwrap();
        let z = ScalarField::zeros(&d);
        let f = constant(&d, 1.0);
        let a = constant(&d, -1.0);
        let err = solve_boundary_vars(&[z.clone(), z.clone()], &a, &z, &z, &f, 1e-12).unwrap_err();
        assert!(matches!(err, IdentityError::PivotVanishes { sample: 0 }));
    }
}
