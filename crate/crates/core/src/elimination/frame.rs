//! The section frame of a pair.
//!
//! With `S` the home-chart section matrix, `S⁻¹·M·S` does not depend on the
//! chart. In this frame a replica `U^±(h)` is the elementary matrix with
//! parameter `h·f`, so elementary factors found in the frame map back to
//! replicas with `h = z/f`.

use crate::bundle::{NilpotentPair, Replica, Sign};
use crate::fields::{MatrixField, ScalarField};
use crate::linalg::{CMat, ElementaryKind};
use crate::scalar::C64;

/// `|det S|` below this is treated as a degenerate frame.
pub const FRAME_DET_TOL: f64 = 1e-12;

pub struct SFrame<'a> {
    pair: &'a NilpotentPair,
}

impl<'a> SFrame<'a> {
    pub fn new(pair: &'a NilpotentPair) -> Self {
        SFrame { pair }
    }

    pub fn is_degenerate(&self, idx: usize) -> bool {
        self.pair.s_at(idx).det().norm() <= FRAME_DET_TOL
    }

    /// `S⁻¹·M·S`, or `None` where the frame degenerates.
    pub fn to_frame(&self, idx: usize, m: &CMat) -> Option<CMat> {
        let s = self.pair.s_at(idx);
        let si = s.inverse_tol(FRAME_DET_TOL).ok()?;
        Some(si.mul_ref(m).mul_ref(s))
    }

    /// `S·M·S⁻¹`, or `None` where the frame degenerates.
    pub fn from_frame(&self, idx: usize, m: &CMat) -> Option<CMat> {
        let s = self.pair.s_at(idx);
        let si = s.inverse_tol(FRAME_DET_TOL).ok()?;
        Some(s.mul_ref(m).mul_ref(&si))
    }
}

pub fn sign_of(kind: ElementaryKind) -> Sign {
    match kind {
        ElementaryKind::Lower => Sign::Minus,
        ElementaryKind::Upper => Sign::Plus,
    }
}

/// Replica whose frame matrix is the elementary of `kind` with parameter `z`.
///
/// `h = z/f` where `|f| > zero_tol` and `0` elsewhere; callers guarantee that
/// `z` vanishes there.
pub fn replica_from_frame(pair: &NilpotentPair, kind: ElementaryKind, z: &[C64]) -> Replica {
    let f = pair.f();
    let tol = pair.zero_tol();
    let h: Vec<C64> = z
        .iter()
        .zip(f.values())
        .map(|(&z, &fv)| if fv.norm() > tol { z / fv } else { C64::new(0.0, 0.0) })
        .collect();
    Replica::new(&pair.id, sign_of(kind), ScalarField::new(f.domain().clone(), h).expect("length matches"))
}

/// Replica with `h = z` directly.
pub fn replica_direct(pair: &NilpotentPair, kind: ElementaryKind, z: Vec<C64>) -> Replica {
    let h = ScalarField::new(pair.f().domain().clone(), z).expect("length matches");
    Replica::new(&pair.id, sign_of(kind), h)
}

/// Pointwise product of replicas, left to right.
pub fn replica_product(pair: &NilpotentPair, replicas: &[Replica]) -> MatrixField {
    MatrixField::from_index_fn(pair.f().domain(), |idx| {
        replicas
            .iter()
            .fold(CMat::identity(), |acc, r| acc.mul_ref(&r.eval_at(pair, idx)))
    })
}
