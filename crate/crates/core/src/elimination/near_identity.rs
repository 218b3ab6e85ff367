//! Four replicas per subdivision step of a frame-unitary homotopy.

use serde::Serialize;

use super::frame::replica_from_frame;
use super::quad::eliminate_four;
use super::subdivide::SubdivisionResult;
use super::ElimError;
use crate::bundle::{NilpotentPair, Replica};
use crate::fields::HomotopyField;
use crate::linalg::{CMat, ElementaryKind};
use crate::scalar::C64;

#[derive(Debug, Clone)]
pub struct NearIdentityResult {
    /// Replicas for `q_{n−1}`, then `q_{n−2}`, …, then `q₀`, so that their
    /// product is `q_{n−1}⋯q₀ = U₁·U₀⁻¹` in the frame.
    pub replicas: Vec<Replica>,
    pub report: NearIdentityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearIdentityReport {
    pub steps: usize,
    /// Largest `‖L(z₁)U(z₂)L(z₃)U(z₄) − q‖` over steps and samples.
    pub max_step_residual: f64,
}

/// Factors each quotient `q_i = U_{t_{i+1}}·U_{t_i}⁻¹` of the frame homotopy
/// `u` by [`eliminate_four`] and maps the parameters to replicas `h = z/f`.
pub fn factor_near_identity(
    u: &HomotopyField,
    sub: &SubdivisionResult,
    pair: &NilpotentPair,
    delta: f64,
    det_tol: f64,
) -> Result<NearIdentityResult, ElimError> {
    let n = u.domain().len();
    let mut blocks: Vec<Vec<Replica>> = Vec::with_capacity(sub.steps());
    let mut worst = 0.0f64;
    let kinds = [
        ElementaryKind::Lower,
        ElementaryKind::Upper,
        ElementaryKind::Lower,
        ElementaryKind::Upper,
    ];
    for w in sub.frames.windows(2) {
        let (a, b) = (u.frame(w[0]), u.frame(w[1]));
        let mut z = vec![vec![C64::new(0.0, 0.0); n]; 4];
        for idx in 0..n {
            let (am, bm) = (a.get(idx), b.get(idx));
            if am == bm {
                continue;
            }
            let q: CMat = bm.mul_ref(&am.inverse()?);
            let quad = eliminate_four(&q, delta, det_tol)?;
            worst = worst.max(quad.product().dist(&q));
            for j in 0..4 {
                z[j][idx] = quad.z[j];
            }
        }
        blocks.push(
            kinds
                .iter()
                .zip(&z)
                .map(|(&k, zv)| replica_from_frame(pair, k, zv))
                .collect(),
        );
    }
    let steps = blocks.len();
    Ok(NearIdentityResult {
        replicas: blocks.into_iter().rev().flatten().collect(),
        report: NearIdentityReport {
            steps,
            max_step_residual: worst,
        },
    })
}
