//! 2×2 complex matrix algebra.
//!
//! Generic over the entry ring so the same code serves float matrices, exact
//! rational matrices and polynomial matrices. Norms, log/exp and QR are float
//! only.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Ring, Scalar, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular (|det| = {det_modulus:e})")]
    Singular { det_modulus: f64 },
    #[error("logarithm requested outside the convergence radius (‖M − Id‖ = {distance})")]
    OutOfRadius { distance: f64 },
    #[error("first column is (numerically) zero, cannot orthonormalize")]
    DegenerateColumn,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub a11: T,
    pub a12: T,
    pub a21: T,
    pub a22: T,
}

pub type CMat = Mat2<C64>;

impl<T: Ring> Mat2<T> {
    pub fn new(a11: T, a12: T, a21: T, a22: T) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Mat2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Mat2::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn diag(a: T, d: T) -> Self {
        Mat2::new(a, T::zero(), T::zero(), d)
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        Mat2::new(
            self.a11.clone() * o.a11.clone() + self.a12.clone() * o.a21.clone(),
            self.a11.clone() * o.a12.clone() + self.a12.clone() * o.a22.clone(),
            self.a21.clone() * o.a11.clone() + self.a22.clone() * o.a21.clone(),
            self.a21.clone() * o.a12.clone() + self.a22.clone() * o.a22.clone(),
        )
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        Mat2::new(
            self.a11.clone() + o.a11.clone(),
            self.a12.clone() + o.a12.clone(),
            self.a21.clone() + o.a21.clone(),
            self.a22.clone() + o.a22.clone(),
        )
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        Mat2::new(
            self.a11.clone() - o.a11.clone(),
            self.a12.clone() - o.a12.clone(),
            self.a21.clone() - o.a21.clone(),
            self.a22.clone() - o.a22.clone(),
        )
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| s.clone() * x.clone())
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Mat2<U> {
        Mat2 {
            a11: f(&self.a11),
            a12: f(&self.a12),
            a21: f(&self.a21),
            a22: f(&self.a22),
        }
    }

    pub fn det(&self) -> T {
        self.a11.clone() * self.a22.clone() - self.a12.clone() * self.a21.clone()
    }

    pub fn trace(&self) -> T {
        self.a11.clone() + self.a22.clone()
    }

    /// `[[a,b],[c,d]] ↦ [[d,−b],[−c,a]]`, so that `M·adj(M) = det(M)·Id`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(
            self.a22.clone(),
            -self.a12.clone(),
            -self.a21.clone(),
            self.a11.clone(),
        )
    }

    pub fn minus_identity(&self) -> Self {
        self.sub_ref(&Self::identity())
    }

    pub fn entries(&self) -> [&T; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Product of a sequence, left to right. Empty products are the identity.
    pub fn product<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self
    where
        T: 'a,
    {
        items
            .into_iter()
            .fold(Self::identity(), |acc, m| acc.mul_ref(m))
    }
}

impl<T: Scalar> Mat2<T> {
    /// Inverse as adjugate/det; fails when `|det| ≤ tol`.
    pub fn inverse_tol(&self, tol: f64) -> Result<Self, LinalgError> {
        let det = self.det();
        let m = det.modulus();
        let inv = det
            .checked_inv()
            .ok_or(LinalgError::Singular { det_modulus: m })?;
        if m <= tol {
            return Err(LinalgError::Singular { det_modulus: m });
        }
        Ok(self.adjugate().scale(&inv))
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        self.inverse_tol(0.0)
    }

    pub fn to_c64(&self) -> CMat {
        self.map(|x| x.to_c64())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Mat2::new(
            self.a11.conj(),
            self.a21.conj(),
            self.a12.conj(),
            self.a22.conj(),
        )
    }
}

impl<T: Ring> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, o: Self) -> Self {
        self.mul_ref(&o)
    }
}

impl<'a, T: Ring> Mul<&'a Mat2<T>> for &'a Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, o: &'a Mat2<T>) -> Mat2<T> {
        self.mul_ref(o)
    }
}

impl<T: Ring> Add for Mat2<T> {
    type Output = Mat2<T>;
    fn add(self, o: Self) -> Self {
        self.add_ref(&o)
    }
}

impl<T: Ring> Sub for Mat2<T> {
    type Output = Mat2<T>;
    fn sub(self, o: Self) -> Self {
        self.sub_ref(&o)
    }
}

impl<T: Ring> Neg for Mat2<T> {
    type Output = Mat2<T>;
    fn neg(self) -> Self {
        self.map(|x| -x.clone())
    }
}

impl CMat {
    pub fn frobenius_sq(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Singular values `(σ_max, σ_min)` in closed form.
    ///
    /// After a phase rotation making `det` real and nonnegative, `M` splits
    /// as `A + B` with `A†A = S²·Id` and `B†B = R²·Id`, and the singular
    /// values are `S + R` and `|S − R|`. Unlike the trace/determinant
    /// formula this has no cancellation when the singular values coincide.
    pub fn singular_values(&self) -> (f64, f64) {
        let det = self.det();
        let dn = det.norm();
        let ph = if dn > 0.0 {
            (det / dn).sqrt().conj()
        } else {
            C64::one()
        };
        let (a, b, c, d) = (self.a11 * ph, self.a12 * ph, self.a21 * ph, self.a22 * ph);
        let s = ((a + d.conj()) / 2.0).norm().hypot(((b - c.conj()) / 2.0).norm());
        let r = ((a - d.conj()) / 2.0).norm().hypot(((b + c.conj()) / 2.0).norm());
        (s + r, (s - r).abs())
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.singular_values().0
    }

    /// Operator-norm distance `‖self − other‖`.
    pub fn dist(&self, other: &CMat) -> f64 {
        self.sub_ref(other).op_norm()
    }

    pub fn dist_to_identity(&self) -> f64 {
        self.minus_identity().op_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_sl2(&self, tol: f64) -> bool {
        (self.det() - C64::one()).norm() <= tol
    }

    /// Columns orthonormal and determinant 1.
    pub fn is_su2(&self, tol: f64) -> bool {
        let gram = self.adjoint().mul_ref(self);
        gram.dist_to_identity() <= tol && self.is_sl2(tol)
    }

    /// `(M − Id)² = 0` to tolerance.
    pub fn is_unipotent(&self, tol: f64) -> bool {
        let n = self.minus_identity();
        n.mul_ref(&n).max_abs() <= tol
    }
}

/// Lower or upper elementary matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementaryKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryFactor<T> {
    pub kind: ElementaryKind,
    pub z: T,
}

impl<T: Ring> ElementaryFactor<T> {
    pub fn lower(z: T) -> Self {
        ElementaryFactor {
            kind: ElementaryKind::Lower,
            z,
        }
    }

    pub fn upper(z: T) -> Self {
        ElementaryFactor {
            kind: ElementaryKind::Upper,
            z,
        }
    }

    pub fn to_mat(&self) -> Mat2<T> {
        match self.kind {
            ElementaryKind::Lower => Mat2::new(T::one(), T::zero(), self.z.clone(), T::one()),
            ElementaryKind::Upper => Mat2::new(T::one(), self.z.clone(), T::zero(), T::one()),
        }
    }

    pub fn inverse(&self) -> Self {
        ElementaryFactor {
            kind: self.kind,
            z: -self.z.clone(),
        }
    }
}

/// `[[1,0],[z,1]]`
pub fn lower<T: Ring>(z: T) -> Mat2<T> {
    ElementaryFactor::lower(z).to_mat()
}

/// `[[1,z],[0,1]]`
pub fn upper<T: Ring>(z: T) -> Mat2<T> {
    ElementaryFactor::upper(z).to_mat()
}

/// Product of elementary factors, left to right.
pub fn elementary_product<T: Ring>(factors: &[ElementaryFactor<T>]) -> Mat2<T> {
    factors
        .iter()
        .fold(Mat2::identity(), |acc, e| acc.mul_ref(&e.to_mat()))
}

const LOG_TERM_CUTOFF: f64 = 1e-16;
const LOG_MAX_TERMS: usize = 400;

/// Matrix logarithm by the series `Σ (−1)^{k+1} X^k / k`, `X = M − Id`.
///
/// Only defined for `‖M − Id‖ ≤ 1/2`. Stops once a term has norm below 1e-16.
pub fn log_near_identity(m: &CMat) -> Result<CMat, LinalgError> {
    let x = m.minus_identity();
    let r = x.op_norm();
    if !(r <= 0.5) {
        return Err(LinalgError::OutOfRadius { distance: r });
    }
    let mut sum = x.clone();
    let mut power = x.clone();
    for k in 2..LOG_MAX_TERMS {
        power = power.mul_ref(&x);
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        let term = power.scale(&C64::new(sign / k as f64, 0.0));
        if term.op_norm() < LOG_TERM_CUTOFF {
            break;
        }
        sum = sum.add_ref(&term);
    }
    Ok(sum)
}

/// Matrix exponential in closed form.
///
/// With `τ = tr L/2`, `L₀ = L − τ·Id` and `s² = −det L₀`:
/// `exp L = e^τ (cosh s · Id + sinh(s)/s · L₀)`.
pub fn exp_mat(l: &CMat) -> CMat {
    let tau = l.trace() / 2.0;
    let l0 = l.sub_ref(&CMat::identity().scale(&tau));
    let s2 = -l0.det();
    let s = s2.sqrt();
    let (ch, shc) = if s.norm() < 1e-4 {
        (
            C64::one() + s2 / 2.0 + s2 * s2 / 24.0,
            C64::one() + s2 / 6.0 + s2 * s2 / 120.0,
        )
    } else {
        (s.cosh(), s.sinh() / s)
    };
    let scale = tau.exp();
    let m = CMat::identity().scale(&ch).add_ref(&l0.scale(&shc));
    if tau.is_zero() {
        m
    } else {
        m.scale(&scale)
    }
}

/// Factors `A = Q·R` with `Q ∈ SU(2)` and `R` upper triangular with real
/// positive `R11` and `det R = det A`.
///
/// The first column of `Q` is the normalized first column of `A`; the second
/// is forced by `Q ∈ SU(2)`. `R21` is exactly zero.
pub fn qr_su2(a: &CMat) -> Result<(CMat, CMat), LinalgError> {
    let r11 = (a.a11.norm_sqr() + a.a21.norm_sqr()).sqrt();
    if !(r11 > 1e-300) || !r11.is_finite() {
        return Err(LinalgError::DegenerateColumn);
    }
    let q11 = a.a11 / r11;
    let q21 = a.a21 / r11;
    let q = CMat::new(q11, -q21.conj(), q21, q11.conj());
    let r12 = q11.conj() * a.a12 + q21.conj() * a.a22;
    let r22 = -q21 * a.a12 + q11 * a.a22;
    let r = CMat::new(C64::new(r11, 0.0), r12, C64::zero(), r22);
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qc, qint, QComplex};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rotation(phi: f64) -> CMat {
        CMat::new(
            c(phi.cos(), 0.0),
            c(-phi.sin(), 0.0),
            c(phi.sin(), 0.0),
            c(phi.cos(), 0.0),
        )
    }

    #[test]
    fn determinant_and_adjugate() {
        assert_eq!(CMat::identity().det(), C64::one());
        let m = CMat::new(c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0), c(4.0, 1.0));
        assert_eq!(
            m.adjugate(),
            CMat::new(c(4.0, 1.0), c(-3.0, 0.0), c(0.0, 1.0), c(1.0, 2.0))
        );
        let prod = m.mul_ref(&m.adjugate());
        assert_eq!(prod, CMat::identity().scale(&m.det()));
    }

    #[test]
    fn inverse_and_singular() {
        let m = CMat::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let inv = m.inverse().unwrap();
        assert_abs_diff_eq!(m.mul_ref(&inv).dist_to_identity(), 0.0, epsilon = 1e-15);
        let s = CMat::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0));
        assert!(matches!(s.inverse(), Err(LinalgError::Singular { .. })));
        let exact = Mat2::new(qint(2), qint(1), qint(1), qint(1));
        assert_eq!(exact.inverse().unwrap(), Mat2::new(qint(1), qint(-1), qint(-1), qint(2)));
    }

    #[test]
    fn rotation_norm_closed_form() {
        for k in 0..50 {
            let phi = -3.0 + 0.13 * k as f64;
            let expect = 2.0 * (phi / 2.0).sin().abs();
            assert_abs_diff_eq!(rotation(phi).dist_to_identity(), expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn op_norm_of_diagonal() {
        let m = CMat::diag(c(3.0, 0.0), c(0.0, -5.0));
        assert_abs_diff_eq!(m.op_norm(), 5.0, epsilon = 1e-14);
        let (hi, lo) = m.singular_values();
        assert_abs_diff_eq!(hi * lo, 15.0, epsilon = 1e-13);
        let r = CMat::new(c(1.0, 1.0), c(2.0, -1.0), c(0.5, 0.0), c(0.0, 3.0));
        let (hi, lo) = r.singular_values();
        assert_abs_diff_eq!(hi * hi + lo * lo, r.frobenius_sq(), epsilon = 1e-12);
        assert_abs_diff_eq!(hi * lo, r.det().norm(), epsilon = 1e-12);
        assert_eq!(CMat::zero().op_norm(), 0.0);
    }

    #[test]
    fn elementary_inverse_is_exact() {
        let z = qc(7, 3, -2, 9);
        let l = lower(z.clone());
        let li = lower(-z.clone());
        assert_eq!(l.mul_ref(&li), Mat2::<QComplex>::identity());
        let u = ElementaryFactor::upper(z);
        assert_eq!(u.to_mat().mul_ref(&u.inverse().to_mat()), Mat2::identity());
        assert_eq!(u.to_mat().det(), qint(1));
    }

    #[test]
    fn log_examples() {
        assert_eq!(log_near_identity(&CMat::identity()).unwrap(), CMat::zero());
        let n = CMat::new(c(0.0, 0.0), c(0.3, -0.1), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(log_near_identity(&CMat::identity().add_ref(&n)).unwrap(), n);
        let d = CMat::diag(c(0.1f64.exp(), 0.0), c((-0.1f64).exp(), 0.0));
        let l = log_near_identity(&d).unwrap();
        assert_abs_diff_eq!(l.a11.re, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(l.a22.re, -0.1, epsilon = 1e-12);
        assert!(l.a12.norm() < 1e-15 && l.a21.norm() < 1e-15);
        let far = CMat::diag(c(2.0, 0.0), c(0.5, 0.0));
        assert!(matches!(log_near_identity(&far), Err(LinalgError::OutOfRadius { .. })));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(exp_mat(&CMat::zero()), CMat::identity());
        let n = CMat::new(c(0.0, 0.0), c(2.0, 1.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_abs_diff_eq!(exp_mat(&n).dist(&CMat::identity().add_ref(&n)), 0.0, epsilon = 1e-15);
        let gen = CMat::new(c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let phi = 0.7;
        let r = exp_mat(&gen.scale(&c(phi, 0.0)));
        assert_abs_diff_eq!(r.dist(&rotation(phi)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn qr_examples() {
        let (q, r) = qr_su2(&CMat::identity()).unwrap();
        assert_eq!(q, CMat::identity());
        assert_eq!(r, CMat::identity());
        let a = CMat::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let (q, r) = qr_su2(&a).unwrap();
        assert_abs_diff_eq!(q.mul_ref(&r).dist(&a), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.a11.re, 5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(r.a21, C64::zero());
        assert!(q.is_su2(1e-14));
        assert!(matches!(qr_su2(&CMat::zero()), Err(LinalgError::DegenerateColumn)));
    }

    fn su2_from(alpha: C64, beta: C64) -> CMat {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        let (a, b) = (alpha / n, beta / n);
        CMat::new(a, -b.conj(), b, a.conj())
    }

    fn arb_c() -> impl Strategy<Value = C64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
    }

    proptest! {
        #[test]
        fn qr_of_su2_is_trivial(a in arb_c(), b in arb_c()) {
            prop_assume!(a.norm() + b.norm() > 0.1);
            let u = su2_from(a, b);
            let (q, r) = qr_su2(&u).unwrap();
            prop_assert!(q.dist(&u) <= 1e-12);
            prop_assert!(r.dist_to_identity() <= 1e-12);
        }

        #[test]
        fn qr_reconstructs_sl2(a in arb_c(), b in arb_c(), c2 in arb_c()) {
            prop_assume!(a.norm() > 0.1);
            let d = (C64::one() + b * c2) / a;
            let m = CMat::new(a, b, c2, d);
            let (q, r) = qr_su2(&m).unwrap();
            prop_assert!(q.adjoint().mul_ref(&q).dist_to_identity() <= 1e-12);
            prop_assert!(q.mul_ref(&r).dist(&m) <= 1e-12 * (1.0 + m.op_norm()));
            prop_assert!(r.a11.im == 0.0 && r.a11.re > 0.0);
            prop_assert!((r.det() - C64::one()).norm() <= 1e-12 * (1.0 + m.op_norm()).powi(2));
        }

        #[test]
        fn log_exp_roundtrip(e in proptest::array::uniform4(arb_c()), s in 0.0..0.5f64) {
            let x = CMat::new(e[0], e[1], e[2], e[3]);
            let n = x.op_norm();
            prop_assume!(n > 1e-9);
            let m = CMat::identity().add_ref(&x.scale(&C64::new(s / n, 0.0)));
            let l = log_near_identity(&m).unwrap();
            prop_assert!(exp_mat(&l).dist(&m) <= 1e-10);
        }

        #[test]
        fn log_is_traceless_on_sl2(a in arb_c(), t in 0.0..0.3f64) {
            let n = a.norm();
            prop_assume!(n > 1e-6);
            let gen = CMat::new(a * (t / n), C64::new(t, 0.0), C64::new(0.0, t), -a * (t / n));
            let m = exp_mat(&gen.scale(&C64::new(0.5, 0.0)));
            prop_assume!(m.dist_to_identity() <= 0.5);
            let l = log_near_identity(&m).unwrap();
            prop_assert!(l.trace().norm() <= 1e-12);
        }

        #[test]
        fn lower_cancels_exactly(num in -50i64..50, den in 1i64..50, im in -50i64..50) {
            let z = qc(num, den, im, den);
            prop_assert_eq!(lower(z.clone()).mul_ref(&lower(-z)), Mat2::<QComplex>::identity());
        }
    }
}
