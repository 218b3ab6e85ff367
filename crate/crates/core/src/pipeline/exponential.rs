//! Exponential form of a certificate: each replica `Id + h·N` becomes
//! `exp(a)` with `a = h·N`. Since `a² = 0` the two agree exactly.

use serde::{Deserialize, Serialize};

use super::certificate::Certificate;
use super::{PipelineError, Stage};
use crate::bundle::{exp_nilpotent, NilpotentPair, Sign};
use crate::fields::io::FieldV1;
use crate::fields::MatrixField;

pub const EXP_CERT_FORMAT: &str = "cert-exp-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpFactor {
    pub pair: String,
    pub sign: Sign,
    pub stage: Stage,
    /// The nilpotent exponent in home coordinates.
    pub a: FieldV1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpCertificate {
    pub format: String,
    pub input_digest: String,
    pub factor_count: usize,
    pub factors: Vec<ExpFactor>,
}

impl ExpCertificate {
    /// `∏ exp(a_k)`, left to right.
    pub fn replay(&self) -> Result<Option<MatrixField>, PipelineError> {
        let mut acc: Option<MatrixField> = None;
        for fct in &self.factors {
            let u = exp_nilpotent(&fct.a.to_matrix()?, 1e-10)?;
            acc = Some(match acc {
                None => u,
                Some(m) => m.mul(&u),
            });
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

pub fn exponentialize(cert: &Certificate, pairs: &[NilpotentPair]) -> Result<ExpCertificate, PipelineError> {
    let mut factors = Vec::with_capacity(cert.factors.len());
    for cf in &cert.factors {
        let r = cf.replica()?;
        let pair = pairs
            .iter()
            .find(|p| p.id == r.pair)
            .ok_or_else(|| PipelineError::UnknownPair(r.pair.clone()))?;
        factors.push(ExpFactor {
            pair: cf.pair.clone(),
            sign: cf.sign,
            stage: cf.stage,
            a: FieldV1::from_matrix(&r.log(pair)),
        });
    }
    Ok(ExpCertificate {
        format: EXP_CERT_FORMAT.into(),
        input_digest: cert.input_digest.clone(),
        factor_count: factors.len(),
        factors,
    })
}
