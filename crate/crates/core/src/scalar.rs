//! Scalar backends: 64-bit complex floats and exact rational complex numbers.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type C64 = Complex64;

/// Complex number with exact rational real and imaginary parts.
pub type QComplex = Complex<BigRational>;

/// Commutative ring operations shared by every matrix entry type
/// (float scalars, exact scalars and polynomials).
pub trait Ring:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// A field of complex scalars with a float view.
pub trait Scalar: Ring + Debug {
    /// Multiplicative inverse, `None` for zero.
    fn checked_inv(&self) -> Option<Self>;
    /// Modulus as f64 (approximate for the exact backend).
    fn modulus(&self) -> f64;
    fn to_c64(&self) -> C64;
    fn from_i64(n: i64) -> Self;
    /// Complex conjugate.
    fn conj(&self) -> Self;
}

impl Scalar for C64 {
    fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.inv())
        }
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn to_c64(&self) -> C64 {
        *self
    }

    fn from_i64(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

impl Scalar for QComplex {
    fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            let n = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
            Some(QComplex::new(self.re.clone() / n.clone(), -self.im.clone() / n))
        }
    }

    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }

    fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    fn from_i64(n: i64) -> Self {
        QComplex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    fn conj(&self) -> Self {
        QComplex::new(self.re.clone(), -self.im.clone())
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact complex number `num_re/den_re + i·num_im/den_im`.
pub fn qc(num_re: i64, den_re: i64, num_im: i64, den_im: i64) -> QComplex {
    QComplex::new(rat(num_re, den_re), rat(num_im, den_im))
}

/// Exact real integer as a complex rational.
pub fn qint(n: i64) -> QComplex {
    QComplex::from_i64(n)
}

/// Converts a finite float to the exact dyadic rational it represents.
pub fn qc_from_c64(z: C64) -> Option<QComplex> {
    Some(QComplex::new(
        BigRational::from_float(z.re)?,
        BigRational::from_float(z.im)?,
    ))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fallback for huge numerators/denominators: scale by bit lengths.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift > 0 {
        r / BigRational::from_integer(BigInt::one() << (shift as usize))
    } else {
        r * BigRational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    let v = scaled.to_f64().unwrap_or(0.0);
    v * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

/// Canonical text form of an exact rational, `num/den` or `num`.
pub fn rat_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form of an exact complex number.
pub fn qc_to_string(z: &QComplex) -> String {
    if z.im.is_zero() {
        rat_to_string(&z.re)
    } else if z.re.is_zero() {
        format!("{}i", rat_to_string(&z.im))
    } else {
        let sign = if z.im.is_negative() { "-" } else { "+" };
        format!("({}{}{}i)", rat_to_string(&z.re), sign, rat_to_string(&z.im.abs()))
    }
}
