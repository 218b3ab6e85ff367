//! Reduction to SU(2) by a QR peel in the section frame.
//!
//! With `H = S⁻¹ĜS = Q·R` and `R = diag(r, 1/r)·U(w)`, the triangular part is
//! the Whitehead quad of `r` followed by one upper factor. These five frame
//! elementaries become replicas with `h = z/f`; the remainder `S·Q·S⁻¹` is
//! unitary in the frame.

use serde::Serialize;

use super::frame::{replica_from_frame, SFrame};
use super::quad::whitehead_diag;
use super::ElimError;
use crate::bundle::{NilpotentPair, Replica};
use crate::fields::{HomotopyField, MatrixField, Region};
use crate::linalg::{qr_su2, CMat, ElementaryKind};
use crate::scalar::C64;

/// `‖R − Id‖` at or below this is rounded to `R = Id`.
pub const TRIANGULAR_SNAP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Su2Reduction {
    /// `L(z₁)U(z₂)L(z₃)U(z₄)U(w)` as replicas, left to right.
    pub replicas: Vec<Replica>,
    /// `Û_t = Ĝ_t·P_t⁻¹` in home coordinates.
    pub unitary: HomotopyField,
    /// `Q_t`, the frame form of `Û_t`.
    pub frame_unitary: HomotopyField,
    pub report: Su2Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Su2Report {
    /// `max ‖Q†Q − Id‖` over frames and samples.
    pub max_unitarity_error: f64,
    /// `max ‖Û·P − Ĝ‖` at the last frame.
    pub max_reconstruction: f64,
}

struct Peel {
    q: CMat,
    quad: [C64; 4],
    w: C64,
}

fn peel(h: &CMat) -> Result<Peel, ElimError> {
    let (q, r) = qr_su2(h)?;
    if r.dist_to_identity() <= TRIANGULAR_SNAP {
        return Ok(Peel {
            q: h.clone(),
            quad: [C64::new(0.0, 0.0); 4],
            w: C64::new(0.0, 0.0),
        });
    }
    let r11 = r.a11;
    let quad = whitehead_diag(r11)?;
    Ok(Peel {
        q,
        quad: quad.z,
        w: r.a12 / r11,
    })
}

/// Peels the triangular part of every frame of `ĝ_t`.
///
/// `ĝ_t` must be exactly the identity on `neighborhood` (a neighbourhood of
/// the zero set of `f`); the emitted parameters vanish there.
pub fn reduce_to_su2(
    g_t: &HomotopyField,
    pair: &NilpotentPair,
    neighborhood: &Region,
) -> Result<Su2Reduction, ElimError> {
    let domain = g_t.domain();
    let n = domain.len();
    let frame = SFrame::new(pair);
    let tol = pair.zero_tol();
    let last_k = g_t.num_frames() - 1;
    let mut unitary = Vec::with_capacity(g_t.num_frames());
    let mut frame_unitary = Vec::with_capacity(g_t.num_frames());
    let mut z = vec![vec![C64::new(0.0, 0.0); n]; 5];
    let mut worst_unit = 0.0f64;
    for (k, g) in g_t.frames().iter().enumerate() {
        let mut u_vals = Vec::with_capacity(n);
        let mut q_vals = Vec::with_capacity(n);
        for idx in 0..n {
            let gm = g.get(idx);
            let near = neighborhood.contains(idx) || pair.f().get(idx).norm() <= tol;
            if near || gm.is_identity() {
                if !gm.is_identity() {
                    return Err(ElimError::NotIdentityNearZeroSet { sample: idx, frame: k });
                }
                u_vals.push(CMat::identity());
                q_vals.push(CMat::identity());
                continue;
            }
            let h = frame
                .to_frame(idx, gm)
                .ok_or(ElimError::NotIdentityNearZeroSet { sample: idx, frame: k })?;
            let p = peel(&h)?;
            worst_unit = worst_unit.max(p.q.adjoint().mul_ref(&p.q).dist_to_identity());
            u_vals.push(frame.from_frame(idx, &p.q).expect("frame is regular here"));
            if k == last_k {
                for j in 0..4 {
                    z[j][idx] = p.quad[j];
                }
                z[4][idx] = p.w;
            }
            q_vals.push(p.q);
        }
        unitary.push(MatrixField::new(domain.clone(), u_vals)?);
        frame_unitary.push(MatrixField::new(domain.clone(), q_vals)?);
    }
    let kinds = [
        ElementaryKind::Lower,
        ElementaryKind::Upper,
        ElementaryKind::Lower,
        ElementaryKind::Upper,
        ElementaryKind::Upper,
    ];
    let replicas: Vec<Replica> = kinds
        .iter()
        .zip(&z)
        .map(|(&kind, zv)| replica_from_frame(pair, kind, zv))
        .collect();
    let p = super::frame::replica_product(pair, &replicas);
    let last_u = unitary.last().expect("at least two frames");
    let mut recon = 0.0f64;
    for idx in 0..n {
        let back = last_u.get(idx).mul_ref(p.get(idx));
        recon = recon.max(back.dist(g_t.last().get(idx)));
    }
    let times = g_t.times().to_vec();
    Ok(Su2Reduction {
        replicas,
        unitary: HomotopyField::new(times.clone(), unitary)?,
        frame_unitary: HomotopyField::new(times, frame_unitary)?,
        report: Su2Report {
            max_unitarity_error: worst_unit,
            max_reconstruction: recon,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{build_pair, ChartBundle, PairOptions, SectionPair};
    use crate::fields::{GridDomain, ScalarField};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn standard_pair(d: &GridDomain) -> NilpotentPair {
        let b = ChartBundle::trivial(d);
        let s = SectionPair::single(MatrixField::identity(d));
        build_pair("std", &b, &s, &ScalarField::constant(d, c(1.0)), &PairOptions::default()).unwrap()
    }

    #[test]
    fn unitary_input_needs_no_replicas() {
        let d = GridDomain::interval(0.0, 1.0, 9).unwrap();
        let pair = standard_pair(&d);
        let g_t = HomotopyField::from_fn(5, |t| {
            MatrixField::from_fn(&d, |p| {
                let a = t * (1.0 + p[0]);
                CMat::new(c(a.cos()), c(-a.sin()), c(a.sin()), c(a.cos()))
            })
        })
        .unwrap();
        let red = reduce_to_su2(&g_t, &pair, &Region::empty(d.len())).unwrap();
        assert!(red.replicas.iter().all(|r| r.h.is_identically_zero()));
        assert!(red.report.max_reconstruction < 1e-14);
    }

    #[test]
    fn non_unitary_frame_is_reconstructed() {
        let d = GridDomain::interval(0.0, 1.0, 9).unwrap();
        let pair = standard_pair(&d);
        let target = CMat::new(c(2.0), c(1.0), c(1.0), c(1.0));
        let g_t = HomotopyField::new(vec![0.0, 1.0], vec![MatrixField::identity(&d), MatrixField::from_fn(&d, |_| target.clone())]).unwrap();
        let red = reduce_to_su2(&g_t, &pair, &Region::empty(d.len())).unwrap();
        assert_eq!(red.replicas.len(), 5);
        assert!(red.report.max_reconstruction < 1e-12);
        for m in red.unitary.last().values() {
            assert!(m.is_su2(1e-12));
        }
        assert!(red.unitary.frame(0).values().iter().all(|m| *m == CMat::identity()));
    }

    #[test]
    fn neighbourhood_must_be_identity() {
        let d = GridDomain::interval(0.0, 1.0, 5).unwrap();
        let pair = standard_pair(&d);
        let g = MatrixField::from_fn(&d, |_| CMat::diag(c(2.0), c(0.5)));
        let g_t = HomotopyField::new(vec![0.0, 1.0], vec![MatrixField::identity(&d), g]).unwrap();
        let nb = Region::from_fn(5, |i| i == 2);
        assert!(matches!(
            reduce_to_su2(&g_t, &pair, &nb),
            Err(ElimError::NotIdentityNearZeroSet { sample: 2, frame: 1 })
        ));
    }
}
