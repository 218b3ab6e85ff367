//! Cutoff splitting of `F = G₁⋯G_m`.
//!
//! With `B` the common zeros of `f₁, …, f_{m−1}` and a cutoff `χ` that is 0
//! on a neighbourhood `U` of `B` and 1 off a larger `U₀` missing the zeros of
//! `f_m`, set `α_t = F_{tχ}` and `β_t = α_t⁻¹F_t`. Then `β` is the identity
//! on `{f_m = 0}` and `α` is the identity on `U`, so `α` is split further
//! with the zero sets of `f₁, …, f_{m−1}` taken outside `U`.

use serde::{Deserialize, Serialize};

use super::{SplitError, SuitableFactor};
use crate::fields::{make_cutoff, HomotopyField, MatrixField, Region, ScalarField};
use crate::linalg::CMat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitOptions {
    /// Radius of `U` in grid cells; `U₀` has radius `2r + 1`. Shrunk as
    /// needed to keep `U₀` off the last zero set.
    pub radius: usize,
    /// `|f|` at or below this counts as zero.
    pub zero_tol: f64,
    /// Allowed `‖F₀ − Id‖` and `‖F₁ − F‖`.
    pub endpoint_tol: f64,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions {
            radius: 3,
            zero_tol: 1e-12,
            endpoint_tol: 1e-10,
        }
    }
}

/// The two-function case.
pub fn split_two(
    f: &MatrixField,
    f_t: &HomotopyField,
    f1: &ScalarField,
    f2: &ScalarField,
    opts: &SplitOptions,
) -> Result<(SuitableFactor, SuitableFactor), SplitError> {
    let mut out = split_general(f, f_t, &[f1.clone(), f2.clone()], opts)?;
    let beta = out.pop().expect("two factors");
    let alpha = out.pop().expect("two factors");
    Ok((alpha, beta))
}

/// Splits `F` into `m` suitable factors, factor `i` frozen on `{fᵢ = 0}`.
///
/// The product of the factor homotopies equals `F_t` at every time frame.
pub fn split_general(
    f: &MatrixField,
    f_t: &HomotopyField,
    fs: &[ScalarField],
    opts: &SplitOptions,
) -> Result<Vec<SuitableFactor>, SplitError> {
    if fs.is_empty() {
        return Err(SplitError::NoFunctions);
    }
    let domain = f.domain();
    if f_t.domain() != domain || fs.iter().any(|g| g.domain() != domain) {
        return Err(SplitError::Field(crate::fields::FieldError::DomainMismatch));
    }
    let dev0 = f_t.frame(0).sup_dist_to_identity();
    let dev1 = f_t.last().sup_dist(f);
    if dev0 > opts.endpoint_tol || dev1 > opts.endpoint_tol {
        return Err(SplitError::BadHomotopy { deviation: dev0.max(dev1) });
    }
    let zero_sets: Vec<Region> = fs.iter().map(|g| g.zero_set(opts.zero_tol)).collect();
    if fs.len() > 1 {
        let common = zero_sets
            .iter()
            .skip(1)
            .fold(zero_sets[0].clone(), |acc, z| acc.intersect(z));
        let first = common.indices().next();
        if let Some(sample) = first {
            return Err(if fs.len() == 2 {
                SplitError::ZeroSetsIntersect { sample }
            } else {
                SplitError::CommonZero { sample }
            });
        }
    }
    // Exact endpoints so that frozen regions are exactly the identity.
    let mut frames = f_t.frames().to_vec();
    frames[0] = MatrixField::identity(domain);
    *frames.last_mut().expect("two frames") = f.clone();
    let h = HomotopyField::new(f_t.times().to_vec(), frames)?;
    let homotopies = split_rec(&h, zero_sets, opts)?;
    Ok(homotopies
        .into_iter()
        .enumerate()
        .map(|(marker, homotopy)| SuitableFactor {
            g: homotopy.last().clone(),
            homotopy,
            marker,
        })
        .collect())
}

fn split_rec(h: &HomotopyField, mut zero_sets: Vec<Region>, opts: &SplitOptions) -> Result<Vec<HomotopyField>, SplitError> {
    let m = zero_sets.len();
    if m == 1 {
        for idx in zero_sets[0].indices() {
            for frame in h.frames() {
                if !frame.get(idx).is_identity() && frame.get(idx).dist_to_identity() > opts.endpoint_tol {
                    return Err(SplitError::CommonZero { sample: idx });
                }
            }
        }
        return Ok(vec![freeze(h, &zero_sets[0])?]);
    }
    let domain = h.domain();
    let last = zero_sets.pop().expect("m ≥ 2");
    let common = zero_sets
        .iter()
        .skip(1)
        .fold(zero_sets[0].clone(), |acc, z| acc.intersect(z));
    if common.is_empty() {
        let mut out = split_rec(h, zero_sets, opts)?;
        out.push(HomotopyField::constant(&MatrixField::identity(domain), h.times().to_vec())?);
        return Ok(out);
    }
    let mut chosen = None;
    for r in (0..=opts.radius).rev() {
        let u0 = domain.dilate(&common, 2 * r + 1);
        if u0.is_disjoint(&last) {
            chosen = Some((domain.dilate(&common, r), u0));
            break;
        }
    }
    let Some((u, u0)) = chosen else {
        return Err(SplitError::NoSeparatingNeighborhood { m: m - 1 });
    };
    let chi = make_cutoff(domain, &u, &u0)?;
    let mut alpha = Vec::with_capacity(h.num_frames());
    let mut beta = Vec::with_capacity(h.num_frames());
    for (k, &t) in h.times().iter().enumerate() {
        let frame = h.frame(k);
        let mut a_vals = Vec::with_capacity(domain.len());
        let mut b_vals = Vec::with_capacity(domain.len());
        for idx in 0..domain.len() {
            let c = chi.get(idx);
            if c == 0.0 {
                a_vals.push(CMat::identity());
                b_vals.push(frame.get(idx).clone());
            } else if c == 1.0 {
                a_vals.push(frame.get(idx).clone());
                b_vals.push(CMat::identity());
            } else {
                let a = h.eval_at(idx, t * c)?;
                let b = a.inverse()?.mul_ref(frame.get(idx));
                a_vals.push(a);
                b_vals.push(b);
            }
        }
        alpha.push(MatrixField::new(domain.clone(), a_vals)?);
        beta.push(MatrixField::new(domain.clone(), b_vals)?);
    }
    let alpha = HomotopyField::new(h.times().to_vec(), alpha)?;
    let beta = HomotopyField::new(h.times().to_vec(), beta)?;
    let outside: Vec<Region> = zero_sets.iter().map(|z| z.intersect(&u.complement())).collect();
    let mut out = split_rec(&alpha, outside, opts)?;
    out.push(freeze(&beta, &last)?);
    Ok(out)
}

/// Rounds frames to exactly `Id` on `region`, where they already agree with
/// `Id` to rounding.
fn freeze(h: &HomotopyField, region: &Region) -> Result<HomotopyField, SplitError> {
    if region.is_empty() {
        return Ok(h.clone());
    }
    let frames = h
        .frames()
        .iter()
        .map(|frame| {
            frame.map_indexed(|idx, m| if region.contains(idx) { CMat::identity() } else { m.clone() })
        })
        .collect();
    Ok(HomotopyField::new(h.times().to_vec(), frames)?)
}
