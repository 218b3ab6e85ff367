//! Certificate replay.

use serde::Serialize;

use super::certificate::Certificate;
use super::config::Backend;
use super::{PipelineError, Stage};
use crate::bundle::{NilpotentPair, Replica};
use crate::fields::{FieldError, MatrixField};
use crate::linalg::{CMat, Mat2};
use crate::scalar::{qc_from_c64, QComplex};

/// Largest allowed `‖(U − Id)²‖` for an emitted factor.
pub const UNIPOTENCE_TOL: f64 = 1e-10;

/// Interpolation violations listed individually; the rest are only counted.
const MAX_LISTED: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub factor: usize,
    pub sample: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub backend: Backend,
    pub factor_count: usize,
    pub max_residual: f64,
    pub worst_sample: Option<usize>,
    pub tolerance: f64,
    /// `max |det ∏U − 1|`.
    pub det_drift: f64,
    /// `max ‖(U − Id)²‖` over factors and samples.
    pub max_unipotence_error: f64,
    pub interpolation_violations: usize,
    pub violations: Vec<Violation>,
    pub digest_matches: Option<bool>,
    pub pass: bool,
}

fn lookup<'a>(pairs: &'a [NilpotentPair], id: &str) -> Result<&'a NilpotentPair, PipelineError> {
    pairs
        .iter()
        .find(|p| p.id == id)
        .ok_or_else(|| PipelineError::UnknownPair(id.to_string()))
}

/// `∏ U_k` in home coordinates, left to right.
pub fn replay(pairs: &[NilpotentPair], replicas: &[Replica]) -> Result<MatrixField, PipelineError> {
    let domain = match pairs.first() {
        Some(p) => p.f().domain().clone(),
        None if replicas.is_empty() => return Err(PipelineError::Input("no pairs to replay against".into())),
        None => return Err(PipelineError::UnknownPair(replicas[0].pair.clone())),
    };
    let resolved = replicas
        .iter()
        .map(|r| {
            let p = lookup(pairs, &r.pair)?;
            if r.h.domain() != &domain || p.f().domain() != &domain {
                return Err(PipelineError::Field(FieldError::DomainMismatch));
            }
            Ok((r, p))
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    Ok(MatrixField::from_index_fn(&domain, |idx| {
        resolved
            .iter()
            .fold(CMat::identity(), |acc, (r, p)| acc.mul_ref(&r.eval_at(p, idx)))
    }))
}

fn exact(m: &CMat) -> Result<Mat2<QComplex>, PipelineError> {
    let q = |z| qc_from_c64(z).ok_or_else(|| PipelineError::Input("non-finite value in exact replay".into()));
    Ok(Mat2::new(q(m.a11)?, q(m.a12)?, q(m.a21)?, q(m.a22)?))
}

/// Residual `‖∏U − F‖` per sample, computed in exact rational arithmetic from
/// the dyadic values of every float.
fn exact_residuals(f: &MatrixField, pairs: &[NilpotentPair], replicas: &[Replica]) -> Result<Vec<f64>, PipelineError> {
    let resolved = replicas
        .iter()
        .map(|r| lookup(pairs, &r.pair).map(|p| (r, p)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::with_capacity(f.len());
    for idx in 0..f.len() {
        let mut acc = Mat2::<QComplex>::identity();
        for (r, p) in &resolved {
            let n = exact(p.n_at(r.sign, idx))?;
            let h = qc_from_c64(r.h.get(idx)).ok_or_else(|| PipelineError::Input("non-finite h".into()))?;
            let u = Mat2::<QComplex>::identity().add_ref(&n.scale(&h));
            acc = acc.mul_ref(&u);
        }
        let diff = acc.sub_ref(&exact(f.get(idx))?);
        out.push(diff.to_c64().op_norm());
    }
    Ok(out)
}

/// Replays `cert` against `F` and audits every factor.
///
/// `input_digest`, when given, is compared with the digest recorded in the
/// certificate.
pub fn verify_certificate(
    f: &MatrixField,
    pairs: &[NilpotentPair],
    cert: &Certificate,
    backend: Backend,
    input_digest: Option<&str>,
) -> Result<VerifyReport, PipelineError> {
    let replicas = cert.replicas()?;
    let product = replay(pairs, &replicas)?;
    if product.domain() != f.domain() {
        return Err(PipelineError::Field(FieldError::DomainMismatch));
    }
    let residuals: Vec<f64> = match backend {
        Backend::Float => product.values().iter().zip(f.values()).map(|(p, g)| p.dist(g)).collect(),
        Backend::Exact => exact_residuals(f, pairs, &replicas)?,
    };
    let (worst_sample, max_residual) = residuals
        .iter()
        .enumerate()
        .fold((None, 0.0f64), |(w, m), (i, &r)| if r > m || r.is_nan() { (Some(i), r) } else { (w, m) });

    let det_drift = product.det_drift();
    let mut unip = 0.0f64;
    let mut violations = Vec::new();
    let mut count = 0usize;
    for (k, (r, cf)) in replicas.iter().zip(&cert.factors).enumerate() {
        let pair = lookup(pairs, &r.pair)?;
        for idx in 0..f.len() {
            let a = pair.n_at(r.sign, idx).scale(&r.h.get(idx));
            unip = unip.max(a.mul_ref(&a).op_norm());
        }
        if cf.stage == Stage::Padding {
            continue;
        }
        let tol = pair.zero_tol();
        for idx in 0..f.len() {
            let v = r.h.get(idx).norm();
            if pair.f().get(idx).norm() <= tol && v > cert.config.tol {
                count += 1;
                if violations.len() < MAX_LISTED {
                    violations.push(Violation { factor: k, sample: idx, value: v });
                }
            }
        }
    }
    let digest_matches = input_digest.map(|d| d == cert.input_digest);
    let pass = max_residual <= cert.tolerance
        && count == 0
        && unip <= UNIPOTENCE_TOL
        && digest_matches != Some(false);
    Ok(VerifyReport {
        backend,
        factor_count: replicas.len(),
        max_residual,
        worst_sample,
        tolerance: cert.tolerance,
        det_drift,
        max_unipotence_error: unip,
        interpolation_violations: count,
        violations,
        digest_matches,
        pass,
    })
}
