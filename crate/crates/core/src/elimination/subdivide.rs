//! Greedy time subdivision so that consecutive quotients are close to `Id`.

use serde::Serialize;

use super::ElimError;
use crate::fields::HomotopyField;
use crate::linalg::CMat;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubdivisionResult {
    /// `0 = t₀ < … < t_n = 1`.
    pub breakpoints: Vec<f64>,
    /// Frame index of each breakpoint.
    pub frames: Vec<usize>,
    /// `sup_x ‖U_{t_{i+1}}·U_{t_i}⁻¹ − Id‖` per step.
    pub closeness: Vec<f64>,
}

impl SubdivisionResult {
    pub fn steps(&self) -> usize {
        self.closeness.len()
    }
}

fn quotient_gap(u: &HomotopyField, i: usize, j: usize) -> Result<f64, ElimError> {
    let mut worst = 0.0f64;
    for (a, b) in u.frame(i).values().iter().zip(u.frame(j).values()) {
        if a == b {
            continue;
        }
        let q: CMat = b.mul_ref(&a.inverse()?);
        worst = worst.max(q.dist_to_identity());
    }
    Ok(worst)
}

/// Picks breakpoints among the time samples of `u`, each step as long as the
/// sup-norm closeness stays `≤ epsilon`.
pub fn subdivide_homotopy(u: &HomotopyField, epsilon: f64) -> Result<SubdivisionResult, ElimError> {
    let last = u.num_frames() - 1;
    let mut frames = vec![0usize];
    let mut closeness = Vec::new();
    let mut i = 0;
    while i < last {
        let first = quotient_gap(u, i, i + 1)?;
        if first > epsilon {
            return Err(ElimError::CannotSatisfy {
                epsilon,
                frame: i,
                next: i + 1,
                gap: first,
            });
        }
        let (mut best, mut best_gap) = (i + 1, first);
        for j in i + 2..=last {
            let g = quotient_gap(u, i, j)?;
            if g > epsilon {
                break;
            }
            best = j;
            best_gap = g;
        }
        frames.push(best);
        closeness.push(best_gap);
        i = best;
    }
    Ok(SubdivisionResult {
        breakpoints: frames.iter().map(|&k| u.times()[k]).collect(),
        frames,
        closeness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{GridDomain, MatrixField};
    use crate::scalar::C64;

    fn rotation(phi: f64) -> CMat {
        CMat::new(
            C64::new(phi.cos(), 0.0),
            C64::new(-phi.sin(), 0.0),
            C64::new(phi.sin(), 0.0),
            C64::new(phi.cos(), 0.0),
        )
    }

    fn rigid(d: &GridDomain, frames: usize) -> HomotopyField {
        HomotopyField::from_fn(frames, |t| MatrixField::from_fn(d, |_| rotation(std::f64::consts::PI * t))).unwrap()
    }

    #[test]
    fn rotation_by_pi_needs_seven_steps() {
        let d = GridDomain::interval(0.0, 1.0, 3).unwrap();
        let bound = 2.0 / std::f64::consts::PI * 0.25f64.asin();
        assert!((bound - 0.1609).abs() < 1e-4);
        let r = subdivide_homotopy(&rigid(&d, 1001), 0.5).unwrap();
        assert_eq!(r.steps(), 7);
        assert!(r.closeness.iter().all(|&c| c <= 0.5));
        assert!(r.breakpoints.windows(2).all(|w| w[1] - w[0] <= bound + 1e-12));
    }

    #[test]
    fn constant_and_loose_tolerance_give_one_step() {
        let d = GridDomain::interval(0.0, 1.0, 3).unwrap();
        let c = HomotopyField::constant(&MatrixField::identity(&d), vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(subdivide_homotopy(&c, 0.5).unwrap().steps(), 1);
        assert_eq!(subdivide_homotopy(&rigid(&d, 50), 2.0).unwrap().steps(), 1);
    }

    #[test]
    fn coarse_sampling_is_reported() {
        let d = GridDomain::interval(0.0, 1.0, 3).unwrap();
        let err = subdivide_homotopy(&rigid(&d, 3), 0.5).unwrap_err();
        assert!(matches!(err, ElimError::CannotSatisfy { frame: 0, next: 1, .. }));
    }
}
