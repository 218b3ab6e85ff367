//! Raising the contact order of `G − Id` along `{f = 0}` to four.
//!
//! Sampled mode: with `τ = min(|f|/ρ, 1)⁴` replace `G_t` by
//! `exp(τ·log G_t)` and move `C_t = exp((1−τ)·log G_t)` into a neighbouring
//! factor. The two commute, so the product is unchanged. `C_t` is the
//! identity wherever `|f| ≥ ρ`, which must avoid the neighbour's zero set.
//! Exact mode divides `G − Id` by `f⁴`.

use serde::{Deserialize, Serialize};

use super::{SplitError, SuitableFactor};
use crate::fields::{
    deviation_field, vanish_order, HomotopyField, MatrixField, Polynomial, Region, ScalarField, VanishReport,
};
use crate::linalg::{exp_mat, log_near_identity, CMat, Mat2};
use crate::scalar::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaperOptions {
    /// Target contact order.
    pub order: u32,
    /// `|f|` at or below this counts as zero.
    pub zero_tol: f64,
    /// Largest taper scale as a fraction of `sup |f|`.
    pub max_scale: f64,
    /// Number of halvings of the scale tried before giving up.
    pub attempts: usize,
}

impl Default for TaperOptions {
    fn default() -> Self {
        TaperOptions {
            order: 4,
            zero_tol: 1e-12,
            max_scale: 0.25,
            attempts: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaperReport {
    pub factor: usize,
    /// `None` when the factor was left unchanged.
    pub scale: Option<f64>,
    pub before: Option<VanishReport>,
    pub after: Option<VanishReport>,
}

/// Decay fit on `{|f| < band}`, doubling the band up to `max_band` while the
/// band holds too few distinct values of `|f|` for a fit.
fn decay(g: &MatrixField, f: &ScalarField, order: u32, band: f64, max_band: f64) -> Option<VanishReport> {
    let dev = deviation_field(g);
    let mut b = band;
    loop {
        match vanish_order(&dev, f, order, b) {
            Ok(r) => return Some(r),
            Err(_) if b < max_band => b = (2.0 * b).min(max_band),
            Err(_) => return None,
        }
    }
}

/// Tapers each factor in place; factor `i` uses `fs[factor.marker]`.
///
/// Compensation goes to the next factor, or to the previous one for the
/// last factor. Factors that already decay at the target order, or whose
/// function has no zeros, are left unchanged.
pub fn upgrade_divisibility(
    factors: &mut [SuitableFactor],
    fs: &[ScalarField],
    opts: &TaperOptions,
) -> Result<Vec<TaperReport>, SplitError> {
    let m = factors.len();
    let mut reports = Vec::with_capacity(m);
    for i in 0..m {
        let f = &fs[factors[i].marker];
        let zeros = f.zero_set(opts.zero_tol);
        let sup = f.sup_norm();
        let band = 0.1 * sup;
        let before = decay(&factors[i].g, f, opts.order, band, 0.5 * sup);
        let trivial = factors[i].homotopy.frames().iter().all(|fr| {
            fr.values().iter().all(|mm| *mm == CMat::identity())
        });
        if zeros.is_empty() || trivial || before.as_ref().is_some_and(|r| r.passes) {
            reports.push(TaperReport {
                factor: i,
                scale: None,
                before,
                after: None,
            });
            continue;
        }
        if m == 1 {
            return Err(SplitError::CannotTaper {
                factor: i,
                reason: "no neighbouring factor to absorb the compensation".into(),
            });
        }
        let j = if i + 1 < m { i + 1 } else { i - 1 };
        let neighbour_zeros = fs[factors[j].marker].zero_set(opts.zero_tol);
        let (scale, tapered, comp) = taper_one(&factors[i].homotopy, f, &neighbour_zeros, sup, opts)
            .ok_or_else(|| SplitError::CannotTaper {
                factor: i,
                reason: "no taper scale keeps the frames near Id and avoids the neighbouring zero set".into(),
            })?;
        let frames_j: Vec<MatrixField> = factors[j]
            .homotopy
            .frames()
            .iter()
            .zip(&comp)
            .map(|(g, c)| if j > i { c.mul(g) } else { g.mul(c) })
            .collect();
        factors[j].homotopy = HomotopyField::new(factors[j].homotopy.times().to_vec(), frames_j)?;
        factors[j].g = factors[j].homotopy.last().clone();
        factors[i].homotopy = tapered;
        factors[i].g = factors[i].homotopy.last().clone();
        let after = decay(&factors[i].g, f, opts.order, band.min(0.5 * scale), 0.5 * scale);
        reports.push(TaperReport {
            factor: i,
            scale: Some(scale),
            before,
            after,
        });
    }
    Ok(reports)
}

type Taper = (f64, HomotopyField, Vec<MatrixField>);

fn taper_one(
    h: &HomotopyField,
    f: &ScalarField,
    avoid: &Region,
    sup: f64,
    opts: &TaperOptions,
) -> Option<Taper> {
    let mut rho = opts.max_scale * sup;
    for _ in 0..opts.attempts {
        if let Some(t) = try_taper(h, f, avoid, rho) {
            return Some(t);
        }
        rho *= 0.5;
    }
    None
}

fn try_taper(h: &HomotopyField, f: &ScalarField, avoid: &Region, rho: f64) -> Option<Taper> {
    let n = f.len();
    let tau: Vec<f64> = f.values().iter().map(|v| (v.norm() / rho).min(1.0).powi(4)).collect();
    if (0..n).any(|idx| tau[idx] < 1.0 && avoid.contains(idx)) {
        return None;
    }
    let mut tapered = Vec::with_capacity(h.num_frames());
    let mut comp = Vec::with_capacity(h.num_frames());
    for frame in h.frames() {
        let mut tv = frame.values().to_vec();
        let mut cv = vec![CMat::identity(); n];
        for idx in 0..n {
            if tau[idx] >= 1.0 || tv[idx].is_identity() {
                continue;
            }
            let l = log_near_identity(&tv[idx]).ok()?;
            tv[idx] = exp_mat(&l.scale(&C64::new(tau[idx], 0.0)));
            cv[idx] = exp_mat(&l.scale(&C64::new(1.0 - tau[idx], 0.0)));
        }
        tapered.push(MatrixField::new(f.domain().clone(), tv).ok()?);
        comp.push(MatrixField::new(f.domain().clone(), cv).ok()?);
    }
    let h = HomotopyField::new(h.times().to_vec(), tapered).ok()?;
    Some((rho, h, comp))
}

/// Exact mode: returns `E` with `G = Id + f^k·E`, or the offending
/// remainder monomials.
pub fn upgrade_divisibility_exact(g: &Mat2<Polynomial>, f: &Polynomial, k: u32) -> Result<Mat2<Polynomial>, SplitError> {
    let x = g.minus_identity();
    Ok(Mat2::new(
        x.a11.divide_exact(f, k)?,
        x.a12.divide_exact(f, k)?,
        x.a21.divide_exact(f, k)?,
        x.a22.divide_exact(f, k)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridDomain;
    use crate::linalg::upper;
    use crate::scalar::qint;
    use crate::splitting::{split_two, SplitOptions};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn first_order_factor_is_tapered_and_product_kept() {
        let d = GridDomain::interval(0.0, 1.0, 401).unwrap();
        let h = HomotopyField::from_fn(9, |t| {
            MatrixField::from_fn(&d, |p| CMat::new(c(1.0), c(t * (0.5 + p[0])), c(-0.4 * t), c(1.0 - 0.4 * t * t * (0.5 + p[0]))))
        })
        .unwrap();
        let g = h.last().clone();
        let f1 = ScalarField::from_real_fn(&d, |p| p[0]);
        let f2 = ScalarField::from_real_fn(&d, |p| 1.0 - p[0]);
        let (a, b) = split_two(&g, &h, &f1, &f2, &SplitOptions::default()).unwrap();
        let mut factors = vec![a, b];
        let fs = vec![f1.clone(), f2.clone()];
        let before = factors[0].g.mul(&factors[1].g);
        let reports = upgrade_divisibility(&mut factors, &fs, &TaperOptions::default()).unwrap();
        let after = factors[0].g.mul(&factors[1].g);
        assert!(after.sup_dist(&before) < 1e-10);
        for r in &reports {
            if r.scale.is_some() {
                assert!(r.after.as_ref().unwrap().passes, "{r:?}");
            }
        }
        assert!(reports.iter().any(|r| r.scale.is_some()));
        for (s, f) in factors.iter().zip(&fs) {
            assert_eq!(s.max_deviation_on(&f.zero_set(1e-12)), 0.0);
        }
    }

    #[test]
    fn nowhere_vanishing_function_leaves_factor_unchanged() {
        let d = GridDomain::interval(0.0, 1.0, 11).unwrap();
        let g = MatrixField::from_fn(&d, |_| upper(c(1.0)));
        let h = HomotopyField::from_fn(3, |t| MatrixField::from_fn(&d, |_| upper(c(t)))).unwrap();
        let mut factors = vec![SuitableFactor { g: g.clone(), homotopy: h, marker: 0 }];
        let fs = vec![ScalarField::constant(&d, c(1.0))];
        let r = upgrade_divisibility(&mut factors, &fs, &TaperOptions::default()).unwrap();
        assert_eq!(r[0].scale, None);
        assert_eq!(factors[0].g, g);
    }

    #[test]
    fn exact_mode() {
        let f = Polynomial::var("f");
        let e = Polynomial::var("e");
        let f4e = &f.pow(4) * &e;
        let one = Polynomial::constant_in(&["f"], qint(1));
        let g = Mat2::new(one.clone(), f4e.clone(), Polynomial::zero_in(&["f"]), one.clone());
        let q = upgrade_divisibility_exact(&g, &f, 4).unwrap();
        assert_eq!(q.a12, e);
        let g1 = Mat2::new(one.clone(), &f * &e, Polynomial::zero_in(&["f"]), one);
        assert!(matches!(upgrade_divisibility_exact(&g1, &f, 4), Err(SplitError::Poly(_))));
    }
}
