//! Cutoff functions on grid domains.

use super::grid::{GridDomain, Region};
use super::FieldError;

/// Values in `[0, 1]`: 0 on the inner region, 1 off the outer region.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffFunction {
    domain: GridDomain,
    values: Vec<f64>,
}

impl CutoffFunction {
    pub fn constant(domain: &GridDomain, v: f64) -> Self {
        CutoffFunction {
            domain: domain.clone(),
            values: vec![v.clamp(0.0, 1.0); domain.len()],
        }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// `1 − χ`, which is 1 on the inner region and 0 off the outer one.
    pub fn complement(&self) -> Self {
        CutoffFunction {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| 1.0 - v).collect(),
        }
    }
}

/// C¹ smoothstep `3s² − 2s³` on `[0, 1]`.
pub fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

/// Builds `χ = smoothstep(d_in / (d_in + d_out))`, where `d_in` is the grid
/// distance to `inner` and `d_out` the distance to the complement of `outer`.
///
/// An outer region covering the whole domain gives `χ ≡ 0`; otherwise an
/// empty inner region gives `χ ≡ 1`.
pub fn make_cutoff(
    domain: &GridDomain,
    inner: &Region,
    outer: &Region,
) -> Result<CutoffFunction, FieldError> {
    if inner.len() != domain.len() || outer.len() != domain.len() {
        return Err(FieldError::Length {
            expected: domain.len(),
            got: inner.len().min(outer.len()),
        });
    }
    if !inner.is_subset(outer) {
        return Err(FieldError::ZeroMargin);
    }
    let outside = outer.complement();
    if outside.is_empty() {
        return Ok(CutoffFunction::constant(domain, 0.0));
    }
    if inner.is_empty() {
        return Ok(CutoffFunction::constant(domain, 1.0));
    }
    let d_in = domain.distance_to(inner);
    let d_out = domain.distance_to(&outside);
    let values = d_in
        .iter()
        .zip(&d_out)
        .map(|(&a, &b)| {
            if a == 0.0 {
                0.0
            } else if b == 0.0 {
                1.0
            } else {
                smoothstep(a / (a + b))
            }
        })
        .collect();
    Ok(CutoffFunction {
        domain: domain.clone(),
        values,
    })
}
