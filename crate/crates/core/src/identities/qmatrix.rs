//! `Q^k = U(z₂f)·L(z₃f)⋯U(z_{2k}f)·L(z_{2k+1}f)` and its entries mod `f³`.
//!
//! Modulo `f³` the entries are
//! `Q₁₁ ≡ 1 + f² Σ_{i≤j} z_{2i}z_{2j+1}`, `Q₁₂ ≡ f Σ z_{2i}`,
//! `Q₂₁ ≡ f Σ z_{2i+1}` and `Q₂₂ ≡ 1 + f² Σ_{j<i} z_{2i}z_{2j+1}`.

use serde::Serialize;

use super::IdentityError;
use crate::fields::Polynomial;
use crate::linalg::{lower, upper, Mat2};
use crate::scalar::qint;

pub const MAX_K: usize = 8;

#[derive(Debug, Clone)]
pub struct QMatrix {
    pub k: usize,
    pub vars: Vec<String>,
    pub m: Mat2<Polynomial>,
}

/// Variable names `z2, …, z{2k+1}, f`.
pub fn q_vars(k: usize) -> Vec<String> {
    let mut v: Vec<String> = (2..=2 * k + 1).map(|i| format!("z{i}")).collect();
    v.push("f".into());
    v
}

fn var(vars: &[&str], name: &str) -> Polynomial {
    Polynomial::var_in(vars, name).expect("variable is in the list")
}

fn check_k(k: usize) -> Result<(), IdentityError> {
    if !(1..=MAX_K).contains(&k) {
        return Err(IdentityError::SizeGuard { k, max: MAX_K });
    }
    Ok(())
}

/// The literal product, exactly.
pub fn q_expand(k: usize) -> Result<QMatrix, IdentityError> {
    check_k(k)?;
    let names = q_vars(k);
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let f = var(&vars, "f");
    let mut m = Mat2::<Polynomial>::identity();
    for i in 1..=k {
        let zu = &var(&vars, &format!("z{}", 2 * i)) * &f;
        let zl = &var(&vars, &format!("z{}", 2 * i + 1)) * &f;
        m = m.mul_ref(&upper(zu)).mul_ref(&lower(zl));
    }
    let m = Mat2::new(
        m.a11.align_to(&names),
        m.a12.align_to(&names),
        m.a21.align_to(&names),
        m.a22.align_to(&names),
    );
    Ok(QMatrix { k, vars: names, m })
}

/// The four closed forms modulo `f³`.
pub fn closed_forms(k: usize) -> Mat2<Polynomial> {
    let names = q_vars(k);
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let z = |i: usize| var(&vars, &format!("z{i}"));
    let f = var(&vars, "f");
    let f2 = &f * &f;
    let one = Polynomial::constant_in(&vars, qint(1));
    let zero = Polynomial::zero_in(&vars);
    let mut s11 = zero.clone();
    let mut s22 = zero.clone();
    let mut s12 = zero.clone();
    let mut s21 = zero;
    for i in 1..=k {
        s12 = &s12 + &z(2 * i);
        s21 = &s21 + &z(2 * i + 1);
        for j in 1..=k {
            let t = &z(2 * i) * &z(2 * j + 1);
            if i <= j {
                s11 = &s11 + &t;
            } else {
                s22 = &s22 + &t;
            }
        }
    }
    Mat2::new(
        &one + &(&f2 * &s11),
        &f * &s12,
        &f * &s21,
        &one + &(&f2 * &s22),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryCheck {
    pub entry: String,
    /// `f³` divides `Q_ij − closed form` exactly.
    pub divisible: bool,
    /// Digest of the cofactor `(Q_ij − closed form)/f³`, or of the remainder.
    pub digest: String,
    pub remainder: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QModReport {
    pub k: usize,
    pub det_is_one: bool,
    pub entries: Vec<EntryCheck>,
    #[serde(skip)]
    pub cofactors: Vec<Option<Polynomial>>,
}

impl QModReport {
    pub fn passes(&self) -> bool {
        self.det_is_one && self.entries.iter().all(|e| e.divisible)
    }
}

/// Subtracts each closed form and divides exactly by `f³`.
pub fn q_mod_f3_check(k: usize) -> Result<QModReport, IdentityError> {
    let q = q_expand(k)?;
    let closed = closed_forms(k);
    let f = Polynomial::var("f");
    let det = &q.m.det() - &Polynomial::constant_in(&[], qint(1));
    let pairs = [
        ("Q11", &q.m.a11, &closed.a11),
        ("Q12", &q.m.a12, &closed.a12),
        ("Q21", &q.m.a21, &closed.a21),
        ("Q22", &q.m.a22, &closed.a22),
    ];
    let mut entries = Vec::new();
    let mut cofactors = Vec::new();
    for (name, actual, form) in pairs {
        let diff = actual - form;
        match diff.divide_exact(&f, 3) {
            Ok(c) => {
                entries.push(EntryCheck {
                    entry: name.into(),
                    divisible: true,
                    digest: c.digest(),
                    remainder: Vec::new(),
                });
                cofactors.push(Some(c));
            }
            Err(crate::fields::PolyError::NotDivisible { remainder }) => {
                entries.push(EntryCheck {
                    entry: name.into(),
                    divisible: false,
                    digest: diff.digest(),
                    remainder,
                });
                cofactors.push(None);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(QModReport {
        k,
        det_is_one: num_traits::Zero::is_zero(&det),
        entries,
        cofactors,
    })
}

/// `Q̃ = (Q^{n−1}₁₁ − 1)/f²` in the variables `z2, …, z{2n−1}, f`.
#[derive(Debug, Clone)]
pub struct ReducedEquation {
    pub n: usize,
    pub vars: Vec<String>,
    pub q11: Polynomial,
    pub reduced: Polynomial,
}

impl ReducedEquation {
    /// Names of the middle variables `z2, …, z{2n−1}`.
    pub fn mid_vars(&self) -> Vec<String> {
        (2..=2 * self.n - 1).map(|i| format!("z{i}")).collect()
    }

    /// `f²·Q̃ + 1 = Q^{n−1}₁₁` exactly.
    pub fn consistent(&self) -> bool {
        let f = Polynomial::var("f");
        let lhs = &(&(&f * &f) * &self.reduced) + &Polynomial::constant_in(&[], qint(1));
        lhs == self.q11
    }
}

pub fn reduced_equation(n: usize) -> Result<ReducedEquation, IdentityError> {
    if n < 2 {
        return Err(IdentityError::TooSmall(n));
    }
    let q = q_expand(n - 1)?;
    let f = Polynomial::var("f");
    let reduced = (&q.m.a11 - &Polynomial::constant_in(&[], qint(1))).divide_exact(&f, 2)?;
    Ok(ReducedEquation {
        n,
        vars: q.vars,
        q11: q.m.a11,
        reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C64;

    #[test]
    fn q1_is_the_two_factor_product() {
        let q = q_expand(1).unwrap();
        let vars = ["z2", "z3", "f"];
        let z2 = var(&vars, "z2");
        let z3 = var(&vars, "z3");
        let f = var(&vars, "f");
        let one = Polynomial::constant_in(&vars, qint(1));
        assert_eq!(q.m.a11, &one + &(&(&z2 * &z3) * &(&f * &f)));
        assert_eq!(q.m.a12, &z2 * &f);
        assert_eq!(q.m.a21, &z3 * &f);
        assert_eq!(q.m.a22, one);
        let v = q.m.a11.evaluate_named(&[("z2", C64::new(2.0, 0.0)), ("z3", C64::new(3.0, 0.0)), ("f", C64::new(1.0, 0.0))]).unwrap();
        assert_eq!(v, C64::new(7.0, 0.0));
    }

    #[test]
    fn q2_f_squared_coefficient() {
        let q = q_expand(2).unwrap();
        let c = q.m.a11.coefficient_of("f", 2);
        let vars = ["z2", "z3", "z4", "z5"];
        let z = |n: &str| var(&vars, n);
        let expected = &(&(&z("z2") * &z("z3")) + &(&z("z2") * &z("z5"))) + &(&z("z4") * &z("z5"));
        assert_eq!(c, expected);
    }

    #[test]
    fn mod_f3_checks_pass_and_cofactors_match() {
        for k in 1..=4 {
            let r = q_mod_f3_check(k).unwrap();
            assert!(r.passes(), "k = {k}: {r:?}");
        }
        let r = q_mod_f3_check(1).unwrap();
        // Q¹₂₂ − 1 is zero, so its cofactor is the zero polynomial.
        assert!(num_traits::Zero::is_zero(r.cofactors[3].as_ref().unwrap()));
    }

    #[test]
    fn upper_right_entry_has_no_even_powers() {
        for k in 1..=5 {
            let q = q_expand(k).unwrap();
            assert!(num_traits::Zero::is_zero(&q.m.a12.coefficient_of("f", 2)));
        }
    }

    #[test]
    fn reduced_equation_is_consistent() {
        for n in 2..=4 {
            let r = reduced_equation(n).unwrap();
            assert!(r.consistent());
        }
        assert!(matches!(reduced_equation(1), Err(IdentityError::TooSmall(1))));
        assert!(matches!(q_expand(9), Err(IdentityError::SizeGuard { .. })));
    }
}
