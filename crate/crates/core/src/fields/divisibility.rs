//! Sampled surrogate for divisibility: decay order of `|g|` against `|f|`.

use serde::Serialize;

use super::field::{MatrixField, ScalarField};
use super::FieldError;

/// Slack subtracted from the target order when judging a fitted slope.
pub const ORDER_SLACK: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishReport {
    /// Least-squares slope of `log|g|` against `log|f|`; `∞` when `g`
    /// vanishes on the whole band.
    pub exponent: f64,
    pub target: u32,
    pub samples: usize,
    /// Samples with `f = 0` but `g ≠ 0` (an outright violation).
    pub violations: usize,
    pub passes: bool,
}

/// Fits the decay exponent of `g` against `f` on `{0 < |f| < band}`.
pub fn vanish_order(
    g: &ScalarField,
    f: &ScalarField,
    k: u32,
    band: f64,
) -> Result<VanishReport, FieldError> {
    if g.domain() != f.domain() {
        return Err(FieldError::DomainMismatch);
    }
    let mut in_band = 0usize;
    let mut violations = 0usize;
    let mut pts = Vec::new();
    for (gv, fv) in g.values().iter().zip(f.values()) {
        let (ga, fa) = (gv.norm(), fv.norm());
        if fa >= band {
            continue;
        }
        in_band += 1;
        if fa == 0.0 {
            if ga > 0.0 {
                violations += 1;
            }
            continue;
        }
        if ga > 0.0 {
            pts.push((fa.ln(), ga.ln()));
        }
    }
    if in_band == 0 {
        return Err(FieldError::EmptyBand { band });
    }
    if pts.is_empty() {
        return Ok(VanishReport {
            exponent: f64::INFINITY,
            target: k,
            samples: in_band,
            violations,
            passes: violations == 0,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 1e-24 {
        return Err(FieldError::EmptyBand { band });
    }
    let exponent = sxy / sxx;
    Ok(VanishReport {
        exponent,
        target: k,
        samples: in_band,
        violations,
        passes: violations == 0 && exponent >= k as f64 - ORDER_SLACK,
    })
}

/// Entrywise maximum modulus of `G − Id`, the scalar fed to decay tests.
pub fn deviation_field(g: &MatrixField) -> ScalarField {
    let vals = g
        .values()
        .iter()
        .map(|m| num_complex::Complex64::new(m.minus_identity().max_abs(), 0.0))
        .collect();
    ScalarField::new(g.domain().clone(), vals).expect("same length")
}
