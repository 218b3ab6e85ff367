//! Replicas `U^±(h) = Id + h·N^±` and the nilpotent log/exp.

use num_complex::Complex64 as C64;

use super::pair::{NilpotentPair, Sign};
use super::BundleError;
use crate::fields::{MatrixField, ScalarField};
use crate::linalg::CMat;

/// A unipotent factor attached to a pair by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Replica {
    pub pair: String,
    pub sign: Sign,
    pub h: ScalarField,
}

impl Replica {
    pub fn new(pair: &str, sign: Sign, h: ScalarField) -> Self {
        Replica {
            pair: pair.to_string(),
            sign,
            h,
        }
    }

    /// `Id + h·N^±` at one sample, in home coordinates.
    pub fn eval_at(&self, pair: &NilpotentPair, idx: usize) -> CMat {
        let n = pair.n_at(self.sign, idx);
        CMat::identity().add_ref(&n.scale(&self.h.get(idx)))
    }

    pub fn eval(&self, pair: &NilpotentPair) -> Result<MatrixField, BundleError> {
        if pair.id != self.pair {
            return Err(BundleError::UnknownPair(self.pair.clone()));
        }
        if pair.f().domain() != self.h.domain() {
            return Err(BundleError::Field(crate::fields::FieldError::DomainMismatch));
        }
        Ok(MatrixField::from_index_fn(self.h.domain(), |idx| self.eval_at(pair, idx)))
    }

    /// The replica with `−h`.
    pub fn inverse(&self) -> Replica {
        Replica {
            pair: self.pair.clone(),
            sign: self.sign,
            h: self.h.scale(C64::new(-1.0, 0.0)),
        }
    }

    /// The nilpotent field `h·N^±`.
    pub fn log(&self, pair: &NilpotentPair) -> MatrixField {
        MatrixField::from_index_fn(self.h.domain(), |idx| pair.n_at(self.sign, idx).scale(&self.h.get(idx)))
    }
}

/// `log U = U − Id` for a unipotent field; the series stops after one term
/// because `(U − Id)² = 0`.
pub fn unipotent_log(u: &MatrixField, tol: f64) -> Result<MatrixField, BundleError> {
    for (idx, m) in u.values().iter().enumerate() {
        if !m.is_unipotent(tol) {
            return Err(BundleError::NotUnipotent { sample: idx });
        }
    }
    Ok(u.map(|m| m.minus_identity()))
}

/// `exp N = Id + N` for a square-zero field.
pub fn exp_nilpotent(n: &MatrixField, tol: f64) -> Result<MatrixField, BundleError> {
    for (idx, m) in n.values().iter().enumerate() {
        if m.mul_ref(m).max_abs() > tol {
            return Err(BundleError::NotUnipotent { sample: idx });
        }
    }
    Ok(n.map(|m| CMat::identity().add_ref(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{build_pair, ChartBundle, PairOptions, SectionPair};
    use crate::fields::GridDomain;
    use crate::linalg::{upper, Mat2};
    use crate::scalar::{qc, QComplex};
    use num_traits::Zero;

    fn standard(d: &GridDomain) -> (ChartBundle, NilpotentPair) {
        let b = ChartBundle::trivial(d);
        let s = SectionPair::single(MatrixField::identity(d));
        let f = ScalarField::constant(d, C64::new(1.0, 0.0));
        let p = build_pair("std", &b, &s, &f, &PairOptions::default()).unwrap();
        (b, p)
    }

    #[test]
    fn zero_parameter_is_identity() {
        let d = GridDomain::interval(0.0, 1.0, 4).unwrap();
        let (_, p) = standard(&d);
        let r = Replica::new("std", Sign::Minus, ScalarField::zeros(&d));
        assert!(r.eval(&p).unwrap().values().iter().all(|m| *m == CMat::identity()));
    }

    #[test]
    fn standard_plus_replica_is_upper_elementary() {
        let d = GridDomain::interval(0.0, 1.0, 4).unwrap();
        let (_, p) = standard(&d);
        let c = C64::new(0.5, -2.0);
        let r = Replica::new("std", Sign::Plus, ScalarField::constant(&d, c));
        let u = r.eval(&p).unwrap();
        assert!(u.values().iter().all(|m| *m == upper(c)));
        let prod = u.mul(&r.inverse().eval(&p).unwrap());
        assert!(prod.values().iter().all(|m| *m == CMat::identity()));
        let other = Replica::new("other", Sign::Plus, ScalarField::zeros(&d));
        assert!(matches!(other.eval(&p), Err(BundleError::UnknownPair(_))));
    }

    #[test]
    fn exact_replica_cancellation() {
        // N is square-zero, so (Id + hN)(Id − hN) = Id exactly over the rationals.
        let n = Mat2::new(qc(2, 1, 0, 1), qc(-4, 1, 0, 1), qc(1, 1, 0, 1), qc(-2, 1, 0, 1));
        assert_eq!(n.mul_ref(&n), Mat2::<QComplex>::zero());
        let h = qc(3, 7, 1, 5);
        let u = Mat2::identity().add_ref(&n.scale(&h));
        let v = Mat2::identity().add_ref(&n.scale(&-h));
        assert_eq!(u.mul_ref(&v), Mat2::identity());
        assert!((u.det() - qc(1, 1, 0, 1)).is_zero());
    }

    #[test]
    fn log_exp_roundtrip() {
        let d = GridDomain::interval(-1.0, 1.0, 9).unwrap();
        let (_, p) = standard(&d);
        let r = Replica::new("std", Sign::Minus, ScalarField::from_real_fn(&d, |x| x[0] * 3.0));
        let u = r.eval(&p).unwrap();
        let l = unipotent_log(&u, 1e-12).unwrap();
        assert_eq!(l, r.log(&p));
        assert_eq!(exp_nilpotent(&l, 1e-12).unwrap(), u);
        let id = MatrixField::identity(&d);
        assert!(unipotent_log(&id, 1e-12).unwrap().values().iter().all(|m| *m == CMat::zero()));
        let bad = MatrixField::from_fn(&d, |_| CMat::diag(C64::new(2.0, 0.0), C64::new(0.5, 0.0)));
        assert!(matches!(unipotent_log(&bad, 1e-12), Err(BundleError::NotUnipotent { sample: 0 })));
    }
}
