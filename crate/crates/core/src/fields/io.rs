//! JSON formats `field-v1` and `poly-v1`.
//!
//! Complex numbers are `[re, im]` pairs. Matrix-valued fields use the same
//! layout with `"kind": "mat2"` and four consecutive entries per point
//! (`a11, a12, a21, a22`). Exact coefficients are `[num, den, num, den]`
//! (real then imaginary part); integers too large for i64 are strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::field::{MatrixField, ScalarField};
use super::grid::GridDomain;
use super::poly::Polynomial;
use super::FieldError;
use crate::linalg::CMat;
use crate::scalar::{QComplex, C64};

pub const FIELD_FORMAT: &str = "field-v1";
pub const POLY_FORMAT: &str = "poly-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainV1 {
    pub axes: Vec<Vec<f64>>,
    pub periodic: Vec<bool>,
}

impl DomainV1 {
    pub fn from_domain(d: &GridDomain) -> Self {
        DomainV1 {
            axes: d.axes().to_vec(),
            periodic: d.periodic().to_vec(),
        }
    }

    pub fn to_domain(&self) -> Result<GridDomain, FieldError> {
        GridDomain::new(self.axes.clone(), self.periodic.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    #[default]
    Scalar,
    Mat2,
}

impl FieldKind {
    fn is_scalar(&self) -> bool {
        *self == FieldKind::Scalar
    }
}

fn default_field_format() -> String {
    FIELD_FORMAT.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldV1 {
    #[serde(default = "default_field_format")]
    pub format: String,
    pub domain: DomainV1,
    #[serde(default, skip_serializing_if = "FieldKind::is_scalar")]
    pub kind: FieldKind,
    pub values: Vec<[f64; 2]>,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: &[f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn check_format(found: &str, expected: &str) -> Result<(), FieldError> {
    if found != expected {
        return Err(FieldError::Format(format!(
            "expected format {expected}, found {found}"
        )));
    }
    Ok(())
}

impl FieldV1 {
    pub fn from_scalar(f: &ScalarField) -> Self {
        FieldV1 {
            format: FIELD_FORMAT.into(),
            domain: DomainV1::from_domain(f.domain()),
            kind: FieldKind::Scalar,
            values: f.values().iter().map(|&z| pair(z)).collect(),
        }
    }

    pub fn from_matrix(m: &MatrixField) -> Self {
        let mut values = Vec::with_capacity(4 * m.len());
        for a in m.values() {
            values.extend([pair(a.a11), pair(a.a12), pair(a.a21), pair(a.a22)]);
        }
        FieldV1 {
            format: FIELD_FORMAT.into(),
            domain: DomainV1::from_domain(m.domain()),
            kind: FieldKind::Mat2,
            values,
        }
    }

    pub fn to_scalar(&self) -> Result<ScalarField, FieldError> {
        check_format(&self.format, FIELD_FORMAT)?;
        if self.kind != FieldKind::Scalar {
            return Err(FieldError::Format("expected a scalar field".into()));
        }
        let d = self.domain.to_domain()?;
        ScalarField::new(d, self.values.iter().map(unpair).collect())
    }

    pub fn to_matrix(&self) -> Result<MatrixField, FieldError> {
        check_format(&self.format, FIELD_FORMAT)?;
        if self.kind != FieldKind::Mat2 {
            return Err(FieldError::Format("expected a mat2 field".into()));
        }
        let d = self.domain.to_domain()?;
        if self.values.len() != 4 * d.len() {
            return Err(FieldError::Length {
                expected: 4 * d.len(),
                got: self.values.len(),
            });
        }
        let vals = self
            .values
            .chunks(4)
            .map(|c| CMat::new(unpair(&c[0]), unpair(&c[1]), unpair(&c[2]), unpair(&c[3])))
            .collect();
        MatrixField::new(d, vals)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTermV1 {
    pub exps: Vec<u32>,
    pub coef: [Value; 4],
}

fn default_poly_format() -> String {
    POLY_FORMAT.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyV1 {
    #[serde(default = "default_poly_format")]
    pub format: String,
    pub vars: Vec<String>,
    pub terms: Vec<PolyTermV1>,
}

fn int_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

fn json_to_int(v: &Value) -> Result<BigInt, FieldError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| FieldError::Format(format!("non-integer coefficient part {n}"))),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| FieldError::Format(format!("bad integer {s:?}: {e}"))),
        other => Err(FieldError::Format(format!("bad coefficient part {other}"))),
    }
}

fn json_to_rat(num: &Value, den: &Value) -> Result<BigRational, FieldError> {
    let d = json_to_int(den)?;
    if d.is_zero() {
        return Err(FieldError::Format("zero denominator".into()));
    }
    Ok(BigRational::new(json_to_int(num)?, d))
}

impl PolyV1 {
    pub fn from_poly(p: &Polynomial) -> Self {
        PolyV1 {
            format: POLY_FORMAT.into(),
            vars: p.vars().to_vec(),
            terms: p
                .terms()
                .map(|(m, c)| PolyTermV1 {
                    exps: m.clone(),
                    coef: [
                        int_to_json(c.re.numer()),
                        int_to_json(c.re.denom()),
                        int_to_json(c.im.numer()),
                        int_to_json(c.im.denom()),
                    ],
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<Polynomial, FieldError> {
        check_format(&self.format, POLY_FORMAT)?;
        let vars: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.exps.len() != vars.len() {
                return Err(FieldError::Format("exponent arity mismatch".into()));
            }
            let re = json_to_rat(&t.coef[0], &t.coef[1])?;
            let im = json_to_rat(&t.coef[2], &t.coef[3])?;
            terms.push((t.exps.clone(), QComplex::new(re, im)));
        }
        Ok(Polynomial::from_terms(&vars, terms))
    }
}
