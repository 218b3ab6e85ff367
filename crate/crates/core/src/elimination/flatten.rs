//! Flattening a homotopy near the zero set.
//!
//! On `W` every frame is within 1/2 of the identity, so `exp(c·log G_t)`
//! contracts it towards `Id` fibrewise. With `c = 0` on `W₀` and `c = 1` off
//! `W` the result is the identity on `W₀` for all times. The last frame is
//! unchanged because it is already the identity on `W`.

use super::ElimError;
use crate::fields::{make_cutoff, HomotopyField, MatrixField, Region};
use crate::linalg::{exp_mat, log_near_identity, CMat};
use crate::scalar::C64;

#[derive(Debug, Clone)]
pub struct FlattenResult {
    pub homotopy: HomotopyField,
    /// Neighbourhood of the zero set where every frame is exactly `Id`.
    pub inner: Region,
    pub outer: Region,
}

/// Flattens `g_t` around `zero_set` using the largest dilation radius
/// `≤ max_radius` on which the log contraction is defined.
///
/// The last frame must already be the identity on that dilation.
pub fn flatten_homotopy(
    g_t: &HomotopyField,
    zero_set: &Region,
    max_radius: usize,
) -> Result<FlattenResult, ElimError> {
    let domain = g_t.domain();
    let n = domain.len();
    if zero_set.is_empty() {
        return Ok(FlattenResult {
            homotopy: g_t.clone(),
            inner: Region::empty(n),
            outer: Region::empty(n),
        });
    }
    let sup_dev = |region: &Region| -> f64 {
        let mut worst = 0.0f64;
        for frame in g_t.frames() {
            for idx in region.indices() {
                worst = worst.max(frame.get(idx).dist_to_identity());
            }
        }
        worst
    };
    let last = g_t.last();
    let mut chosen = None;
    for r in (1..=max_radius.max(1)).rev() {
        let w = domain.dilate(zero_set, r);
        let last_ok = w.indices().all(|i| last.get(i).is_identity());
        if last_ok && sup_dev(&w) <= 0.5 {
            chosen = Some((r, w));
            break;
        }
    }
    let Some((r, outer)) = chosen else {
        let sample = zero_set.indices().next().unwrap_or(0);
        return Err(ElimError::NotIdentityNearZeroSet {
            sample,
            frame: g_t.num_frames() - 1,
        });
    };
    let inner = domain.dilate(zero_set, r / 2);
    let c = make_cutoff(domain, &inner, &outer)?;
    let mut frames = Vec::with_capacity(g_t.num_frames());
    for frame in g_t.frames() {
        let mut vals = frame.values().to_vec();
        for idx in outer.indices() {
            let cv = c.get(idx);
            vals[idx] = if cv == 0.0 {
                CMat::identity()
            } else {
                let l = log_near_identity(&vals[idx])?;
                exp_mat(&l.scale(&C64::new(cv, 0.0)))
            };
        }
        frames.push(MatrixField::new(domain.clone(), vals)?);
    }
    Ok(FlattenResult {
        homotopy: HomotopyField::new(g_t.times().to_vec(), frames)?,
        inner,
        outer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridDomain;

    #[test]
    fn flattened_homotopy_is_identity_near_zero_set() {
        let d = GridDomain::interval(-1.0, 1.0, 41).unwrap();
        let zero = Region::from_fn(d.len(), |i| i == 20);
        // A bump in the middle of time that vanishes at t = 0, 1 near x = 0.
        let g_t = HomotopyField::from_fn(11, |t| {
            MatrixField::from_fn(&d, |p| {
                let s = 0.3 * (std::f64::consts::PI * t).sin() * (1.0 + p[0]);
                let s = if p[0].abs() < 0.2 { s * t * (1.0 - t) * 4.0 } else { s * t };
                crate::linalg::upper(C64::new(s, 0.0))
            })
        })
        .unwrap();
        // Make the final frame the identity near x = 0.
        let mut frames = g_t.frames().to_vec();
        let last = frames.last_mut().unwrap();
        for idx in 0..d.len() {
            if (d.coords(idx)[0]).abs() < 0.2 {
                last.values_mut()[idx] = CMat::identity();
            }
        }
        let g_t = HomotopyField::new(g_t.times().to_vec(), frames).unwrap();
        let res = flatten_homotopy(&g_t, &zero, 3).unwrap();
        assert!(res.inner.contains(20) && res.inner.is_subset(&res.outer));
        for frame in res.homotopy.frames() {
            for idx in res.inner.indices() {
                assert_eq!(*frame.get(idx), CMat::identity());
            }
        }
        assert_eq!(res.homotopy.last(), g_t.last());
        for (a, b) in res.homotopy.frames().iter().zip(g_t.frames()) {
            for idx in res.outer.complement().indices() {
                assert_eq!(a.get(idx), b.get(idx));
            }
        }
    }

    #[test]
    fn empty_zero_set_is_untouched() {
        let d = GridDomain::interval(0.0, 1.0, 5).unwrap();
        let g_t = HomotopyField::constant(&MatrixField::identity(&d), vec![0.0, 1.0]).unwrap();
        let res = flatten_homotopy(&g_t, &Region::empty(5), 3).unwrap();
        assert_eq!(res.homotopy.frames(), g_t.frames());
    }
}
