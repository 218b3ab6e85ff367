//! The factorization driver.
//!
//! `F = G₁⋯G_m` by splitting; each `G_i` is tapered, localized near the zero
//! set of its function, flattened there, reduced to SU(2) and factored
//! along a subdivision of its unitary homotopy. Per factor the replicas are
//! emitted as near-identity steps, then the SU(2) peel, then the
//! localization, whose product is `Û·P·V = G_i`.

use super::certificate::{CertFactor, Certificate, StageRecord, CERT_FORMAT};
use super::config::RunConfig;
use super::verify::replay;
use super::{PipelineError, Stage};
use crate::bundle::{NilpotentPair, Replica, Sign};
use crate::elimination::{
    factor_near_identity, flatten_homotopy, localize_to_identity, reduce_to_su2, replica_product, subdivide_homotopy,
    ElimError,
};
use crate::fields::{HomotopyField, MatrixField, ScalarField};
use crate::identities::PADDING_WORD;
use crate::splitting::{split_general, upgrade_divisibility, SplitOptions, SuitableFactor, TaperOptions};
use crate::scalar::C64;

fn stage_err(stage: Stage, factor: usize) -> impl Fn(ElimError) -> PipelineError {
    move |source| PipelineError::Stage { stage, factor, source }
}

/// `V_t`: the localization replicas with `h` scaled by `t`, inverted.
fn scaled_inverse(pair: &NilpotentPair, replicas: &[Replica], t: f64) -> MatrixField {
    let inv: Vec<Replica> = replicas
        .iter()
        .rev()
        .map(|r| Replica::new(&r.pair, r.sign, r.h.scale(C64::new(-t, 0.0))))
        .collect();
    replica_product(pair, &inv)
}

/// Time samples are refined up to this count when subdivision cannot close
/// a gap between consecutive frames.
const MAX_FRAMES: usize = 1025;

/// Inserts the midpoint of every time interval.
fn refine(times: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * times.len() - 1);
    for w in times.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*times.last().expect("at least two times"));
    out
}

/// `G′_t = G_t·V_t⁻¹` on `times`, with the last frame the localization
/// remainder. Off the input time samples `G_t` is interpolated.
fn localized_homotopy(
    sf: &SuitableFactor,
    pair: &NilpotentPair,
    replicas: &[Replica],
    remainder: &MatrixField,
    times: &[f64],
) -> Result<HomotopyField, PipelineError> {
    let last = times.len() - 1;
    let mut frames = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        if k == last {
            frames.push(remainder.clone());
            continue;
        }
        let g = match sf.homotopy.times().iter().position(|&s| s == t) {
            Some(j) => sf.homotopy.frame(j).clone(),
            None => {
                let vals = (0..remainder.len())
                    .map(|idx| sf.homotopy.eval_at(idx, t))
                    .collect::<Result<Vec<_>, _>>()?;
                MatrixField::new(remainder.domain().clone(), vals)?
            }
        };
        frames.push(if replicas.is_empty() {
            g
        } else {
            g.mul(&scaled_inverse(pair, replicas, t))
        });
    }
    Ok(HomotopyField::new(times.to_vec(), frames)?)
}

struct FactorOutput {
    replicas: Vec<(Replica, Stage)>,
    records: Vec<StageRecord>,
}

fn factor_one(
    i: usize,
    sf: &SuitableFactor,
    pair: &NilpotentPair,
    config: &RunConfig,
) -> Result<FactorOutput, PipelineError> {
    let mut records = Vec::new();
    let loc = localize_to_identity(&sf.g, pair, config.radius, config.snap_tol)
        .map_err(stage_err(Stage::Localize, i))?;
    records.push(
        StageRecord::new(Stage::Localize, Some(i), loc.replicas.len())
            .with("max_residual_on_omega", loc.report.max_residual_on_omega)
            .with("omega_samples", loc.omega.count() as f64)
            .with("remainder_det_drift", loc.remainder.det_drift()),
    );

    let zero_set = pair.zero_set();
    let mut times = sf.homotopy.times().to_vec();
    let (su2, sub) = loop {
        let g_prime = localized_homotopy(sf, pair, &loc.replicas, &loc.remainder, &times)?;
        let flat = flatten_homotopy(&g_prime, &zero_set, config.radius).map_err(stage_err(Stage::Flatten, i))?;
        let su2 = reduce_to_su2(&flat.homotopy, pair, &flat.inner).map_err(stage_err(Stage::Su2, i))?;
        match subdivide_homotopy(&su2.frame_unitary, config.epsilon) {
            Ok(sub) => {
                records.push(
                    StageRecord::new(Stage::Flatten, Some(i), 0)
                        .with("frames", times.len() as f64)
                        .with("inner_samples", flat.inner.count() as f64)
                        .with("outer_samples", flat.outer.count() as f64),
                );
                break (su2, sub);
            }
            Err(ElimError::CannotSatisfy { .. }) if times.len() < MAX_FRAMES => times = refine(&times),
            Err(e) => return Err(stage_err(Stage::Subdivision, i)(e)),
        }
    };
    records.push(
        StageRecord::new(Stage::Su2, Some(i), su2.replicas.len())
            .with("max_unitarity_error", su2.report.max_unitarity_error)
            .with("max_reconstruction", su2.report.max_reconstruction),
    );
    records.push(
        StageRecord::new(Stage::Subdivision, Some(i), 0)
            .with("steps", sub.steps() as f64)
            .with("max_closeness", sub.closeness.iter().cloned().fold(0.0, f64::max)),
    );

    let near = factor_near_identity(&su2.frame_unitary, &sub, pair, config.delta, config.tol)
        .map_err(stage_err(Stage::NearIdentity, i))?;
    records.push(
        StageRecord::new(Stage::NearIdentity, Some(i), near.replicas.len())
            .with("max_step_residual", near.report.max_step_residual),
    );

    let replicas = near
        .replicas
        .into_iter()
        .map(|r| (r, Stage::NearIdentity))
        .chain(su2.replicas.into_iter().map(|r| (r, Stage::Su2)))
        .chain(loc.replicas.into_iter().map(|r| (r, Stage::Localize)))
        .collect();
    Ok(FactorOutput { replicas, records })
}

/// The word `U⁻(1)·U⁺(0)·U⁻(−1)·U⁺(0)` on `pair`, whose product is `Id`.
fn padding(pair: &NilpotentPair) -> Vec<Replica> {
    let d = pair.f().domain();
    PADDING_WORD
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let sign = if k % 2 == 0 { Sign::Minus } else { Sign::Plus };
            Replica::new(&pair.id, sign, ScalarField::constant(d, C64::new(v, 0.0)))
        })
        .collect()
}

/// Factors `F` into replicas of `pairs`, given a null-homotopy `F_t` with
/// `F_0 = Id` and `F_1 = F`. Factor `i` of the split uses `pairs[i]`.
pub fn factor_automorphism(
    f: &MatrixField,
    f_t: &HomotopyField,
    pairs: &[NilpotentPair],
    config: &RunConfig,
    input_digest: &str,
) -> Result<Certificate, PipelineError> {
    config.validate()?;
    if pairs.is_empty() {
        return Err(PipelineError::Input("at least one pair is required".into()));
    }
    if pairs.iter().any(|p| p.f().domain() != f.domain()) || f_t.domain() != f.domain() {
        return Err(PipelineError::Input("F, its homotopy and the pairs must share one domain".into()));
    }
    let det_error = f.det_drift();
    if !(det_error <= config.tol) {
        return Err(PipelineError::NotSpecial { det_error });
    }

    let fs: Vec<ScalarField> = pairs.iter().map(|p| p.f().clone()).collect();
    let split_opts = SplitOptions {
        radius: config.radius,
        zero_tol: config.zero_tol,
        ..SplitOptions::default()
    };
    let mut factors = split_general(f, f_t, &fs, &split_opts)?;
    let mut records = vec![StageRecord::new(Stage::Split, None, 0).with("factors", factors.len() as f64)];
    let taper_opts = TaperOptions {
        zero_tol: config.zero_tol,
        ..TaperOptions::default()
    };
    for t in upgrade_divisibility(&mut factors, &fs, &taper_opts)? {
        let mut rec = StageRecord::new(Stage::Taper, Some(t.factor), 0);
        if let Some(s) = t.scale {
            rec = rec.with("scale", s);
        }
        if let Some(a) = t.after.as_ref().or(t.before.as_ref()) {
            if a.exponent.is_finite() {
                rec = rec.with("decay_exponent", a.exponent);
            }
        }
        records.push(rec);
    }

    let mut emitted: Vec<CertFactor> = Vec::new();
    for (i, sf) in factors.iter().enumerate() {
        let pair = &pairs[sf.marker];
        let out = factor_one(i, sf, pair, config)?;
        records.extend(out.records);
        for (r, stage) in out.replicas {
            if r.h.is_identically_zero() {
                continue;
            }
            emitted.push(CertFactor::from_replica(&r, stage, Some(i)));
        }
    }
    if !emitted.is_empty() {
        let pad = padding(&pairs[0]);
        records.push(StageRecord::new(Stage::Padding, None, pad.len()));
        emitted.extend(pad.iter().map(|r| CertFactor::from_replica(r, Stage::Padding, None)));
    }
    if emitted.len() > config.max_factors {
        return Err(PipelineError::TooManyFactors {
            count: emitted.len(),
            max: config.max_factors,
        });
    }

    let replicas: Vec<Replica> = emitted.iter().map(CertFactor::replica).collect::<Result<_, _>>()?;
    let max_residual = if replicas.is_empty() {
        f.sup_dist_to_identity()
    } else {
        replay(pairs, &replicas)?.sup_dist(f)
    };
    let k = emitted.len();
    Ok(Certificate {
        format: CERT_FORMAT.into(),
        input_digest: input_digest.to_string(),
        config: config.clone(),
        factor_count: k,
        max_residual,
        tolerance: config.tol * k.max(1) as f64,
        stages: records,
        factors: emitted,
    })
}
