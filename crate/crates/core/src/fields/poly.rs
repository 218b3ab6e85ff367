//! Exact multivariate polynomials with rational complex coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::scalar::{qc_to_string, qint, QComplex, Scalar, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("not divisible: remainder has {} term(s), e.g. {}", remainder.len(), remainder.first().map(String::as_str).unwrap_or(""))]
    NotDivisible { remainder: Vec<String> },
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
}

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

/// Sparse polynomial. Zero coefficients are never stored; monomials are kept
/// in lexicographic order of their exponent vectors, the last one leading.
#[derive(Debug, Clone)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, QComplex>,
}

impl Polynomial {
    pub fn zero_in(vars: &[&str]) -> Self {
        Polynomial {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant_in(vars: &[&str], c: QComplex) -> Self {
        let mut p = Self::zero_in(vars);
        p.insert(vec![0; vars.len()], c);
        p
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var(name: &str) -> Self {
        let mut p = Self::zero_in(&[name]);
        p.insert(vec![1], qint(1));
        p
    }

    /// Variable `name` expressed over the given variable list.
    pub fn var_in(vars: &[&str], name: &str) -> Result<Self, PolyError> {
        let pos = vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        let mut e = vec![0; vars.len()];
        e[pos] = 1;
        let mut p = Self::zero_in(vars);
        p.insert(e, qint(1));
        Ok(p)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, QComplex)>>(
        vars: &[&str],
        terms: I,
    ) -> Self {
        let mut p = Self::zero_in(vars);
        for (m, c) in terms {
            assert_eq!(m.len(), vars.len(), "monomial arity mismatch");
            p.insert(m, c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QComplex)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, m: Monomial, c: QComplex) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = existing.clone() + c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Re-expresses the polynomial over `vars`, which must contain all of
    /// the current variables.
    pub fn align_to(&self, vars: &[String]) -> Self {
        if vars == self.vars.as_slice() {
            return self.clone();
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .expect("target variable list must contain every variable")
            })
            .collect();
        let mut out = Polynomial {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (i, &k) in m.iter().enumerate() {
                e[map[i]] = k;
            }
            out.insert(e, c.clone());
        }
        out
    }

    fn union_vars(a: &[String], b: &[String]) -> Vec<String> {
        let mut v = a.to_vec();
        for x in b {
            if !v.contains(x) {
                v.push(x.clone());
            }
        }
        v
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        if self.vars == other.vars {
            return (self.clone(), other.clone());
        }
        let v = Self::union_vars(&self.vars, &other.vars);
        (self.align_to(&v), other.align_to(&v))
    }

    pub fn scale(&self, c: &QComplex) -> Self {
        let mut out = Polynomial {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        if c.is_zero() {
            return out;
        }
        for (m, k) in &self.terms {
            out.terms.insert(m.clone(), k.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Polynomial::constant_in(&[], qint(1)).align_to(&self.vars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn partial_derivative(&self, var: &str) -> Self {
        let mut out = Polynomial {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        let Some(i) = self.var_index(var) else {
            return out;
        };
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut e = m.clone();
            e[i] -= 1;
            out.insert(e, c.clone() * qint(m[i] as i64));
        }
        out
    }

    /// Replaces `var` by `q`. The result keeps `var` in its variable list.
    pub fn substitute(&self, var: &str, q: &Polynomial) -> Self {
        let Some(i) = self.var_index(var) else {
            return self.clone();
        };
        let vars = Self::union_vars(&self.vars, &q.vars);
        let q = q.align_to(&vars);
        let mut powers: Vec<Polynomial> = vec![Polynomial::constant_in(&[], qint(1)).align_to(&vars)];
        let mut out = Polynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let k = m[i] as usize;
            while powers.len() <= k {
                let next = &powers[powers.len() - 1] * &q;
                powers.push(next);
            }
            let mut e = vec![0; vars.len()];
            for (j, &x) in m.iter().enumerate() {
                if j != i {
                    e[j] = x;
                }
            }
            let mono = Polynomial::from_terms_owned(vars.clone(), [(e, c.clone())]);
            out = &out + &(&mono * &powers[k]);
        }
        out
    }

    fn from_terms_owned<I: IntoIterator<Item = (Monomial, QComplex)>>(
        vars: Vec<String>,
        terms: I,
    ) -> Self {
        let mut p = Polynomial {
            vars,
            terms: BTreeMap::new(),
        };
        for (m, c) in terms {
            p.insert(m, c);
        }
        p
    }

    /// Exact value at a point given in this polynomial's variable order.
    pub fn evaluate_exact(&self, point: &[QComplex]) -> Result<QComplex, PolyError> {
        if point.len() != self.vars.len() {
            return Err(PolyError::Arity {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let mut acc = QComplex::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(m) {
                for _ in 0..k {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Float value at a point given in this polynomial's variable order.
    pub fn evaluate(&self, point: &[C64]) -> Result<C64, PolyError> {
        if point.len() != self.vars.len() {
            return Err(PolyError::Arity {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let mut acc = C64::zero();
        for (m, c) in &self.terms {
            let mut t = c.to_c64();
            for (x, &k) in point.iter().zip(m) {
                if k > 0 {
                    t *= x.powu(k);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Float value with variables given by name; unnamed variables are 0.
    pub fn evaluate_named(&self, values: &[(&str, C64)]) -> Result<C64, PolyError> {
        let mut point = vec![C64::zero(); self.vars.len()];
        for (name, v) in values {
            if let Some(i) = self.var_index(name) {
                point[i] = *v;
            }
        }
        self.evaluate(&point)
    }

    /// Coefficient of `var^k`, as a polynomial in the remaining variables.
    pub fn coefficient_of(&self, var: &str, k: u32) -> Self {
        let mut out = Polynomial {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        let Some(i) = self.var_index(var) else {
            if k == 0 {
                return self.clone();
            }
            return out;
        };
        for (m, c) in &self.terms {
            if m[i] == k {
                let mut e = m.clone();
                e[i] = 0;
                out.insert(e, c.clone());
            }
        }
        out
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        match self.var_index(var) {
            Some(i) => self.terms.keys().map(|m| m[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Exact quotient `p / f^k`.
    pub fn divide_exact(&self, f: &Polynomial, k: u32) -> Result<Polynomial, PolyError> {
        self.divide_by(&f.pow(k))
    }

    /// Exact quotient by `d`, using the division algorithm in lex order.
    ///
    /// For a single divisor the remainder is zero iff `d` divides `self`.
    pub fn divide_by(&self, d: &Polynomial) -> Result<Polynomial, PolyError> {
        if d.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        let (mut rem, d) = self.aligned(d);
        let (lead_m, lead_c) = {
            let (m, c) = d.terms.last_key_value().expect("nonzero divisor");
            (m.clone(), c.clone())
        };
        let lead_inv = lead_c.checked_inv().expect("nonzero leading coefficient");
        let mut quotient = Polynomial {
            vars: rem.vars.clone(),
            terms: BTreeMap::new(),
        };
        let mut remainder = Polynomial {
            vars: rem.vars.clone(),
            terms: BTreeMap::new(),
        };
        while let Some((m, c)) = rem.terms.last_key_value() {
            let (m, c) = (m.clone(), c.clone());
            if m.iter().zip(&lead_m).all(|(a, b)| a >= b) {
                let e: Monomial = m.iter().zip(&lead_m).map(|(a, b)| a - b).collect();
                let coef = c * lead_inv.clone();
                for (dm, dc) in &d.terms {
                    let prod: Monomial = dm.iter().zip(&e).map(|(a, b)| a + b).collect();
                    rem.insert(prod, -(dc.clone() * coef.clone()));
                }
                quotient.insert(e, coef);
            } else {
                rem.terms.remove(&m);
                remainder.insert(m, c);
            }
        }
        if remainder.is_zero() {
            Ok(quotient)
        } else {
            Err(PolyError::NotDivisible {
                remainder: remainder.monomial_strings(),
            })
        }
    }

    fn monomial_strings(&self) -> Vec<String> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| format_term(&self.vars, m, c))
            .collect()
    }

    /// SHA-256 of the canonical text form, used in reports.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_string().as_bytes()))
    }

    /// Drops variables that no term uses.
    pub fn trimmed(&self) -> Self {
        let used: Vec<String> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(i, _)| self.terms.keys().any(|m| m[*i] > 0))
            .map(|(_, v)| v.clone())
            .collect();
        let idx: Vec<usize> = used
            .iter()
            .map(|v| self.var_index(v).unwrap())
            .collect();
        let mut out = Polynomial {
            vars: used,
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            out.insert(idx.iter().map(|&i| m[i]).collect(), c.clone());
        }
        out
    }

    /// Equality as polynomials, ignoring variable-list differences.
    pub fn same_as(&self, other: &Polynomial) -> bool {
        (self - other).is_zero()
    }
}

impl PartialEq for Polynomial {
    /// Equality as polynomials, independent of the variable lists.
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            self.terms == other.terms
        } else {
            (self - other).is_zero()
        }
    }
}

fn format_term(vars: &[String], m: &Monomial, c: &QComplex) -> String {
    let mono: Vec<String> = vars
        .iter()
        .zip(m)
        .filter(|(_, &k)| k > 0)
        .map(|(v, &k)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
        .collect();
    if mono.is_empty() {
        return qc_to_string(c);
    }
    let body = mono.join("*");
    if *c == qint(1) {
        body
    } else if *c == qint(-1) {
        format!("-{body}")
    } else {
        format!("{}*{}", qc_to_string(c), body)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts = self.monomial_strings();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Zero for Polynomial {
    fn zero() -> Self {
        Polynomial {
            vars: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Polynomial {
    fn one() -> Self {
        Polynomial::constant_in(&[], qint(1))
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &'a Polynomial) -> Polynomial {
        let (mut a, b) = self.aligned(o);
        for (m, c) in b.terms {
            a.insert(m, c);
        }
        a
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &'a Polynomial) -> Polynomial {
        let (mut a, b) = self.aligned(o);
        for (m, c) in b.terms {
            a.insert(m, -c);
        }
        a
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &'a Polynomial) -> Polynomial {
        let (a, b) = self.aligned(o);
        let mut out = Polynomial {
            vars: a.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.insert(m, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, o: Polynomial) -> Polynomial {
        &self + &o
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, o: Polynomial) -> Polynomial {
        &self - &o
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, o: Polynomial) -> Polynomial {
        &self * &o
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&qint(-1))
    }
}
