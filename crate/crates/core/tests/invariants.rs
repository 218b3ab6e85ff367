use std::sync::OnceLock;

use proptest::prelude::*;
use unifactor::bundle::{build_pair, ChartBundle, NilpotentPair, PairOptions, SectionPair};
use unifactor::fields::io::FieldV1;
use unifactor::fields::{GridDomain, MatrixField, ScalarField};
use unifactor::identities::{psi_eval, PADDING_WORD};
use unifactor::pipeline::{
    circle_problem, degenerate_problem, factor_automorphism, verify_certificate, Backend, Certificate, Problem, RunConfig,
    Stage,
};
use unifactor::scalar::C64;

fn run(p: &Problem) -> Certificate {
    factor_automorphism(&p.f, &p.f_t, &p.pairs, &RunConfig::default(), &p.digest).unwrap()
}

fn circle() -> &'static (Problem, Certificate) {
    static CELL: OnceLock<(Problem, Certificate)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = circle_problem(64, 33);
        let c = run(&p);
        (p, c)
    })
}

fn shifted_pair(d: &GridDomain, shift: f64) -> NilpotentPair {
    let b = ChartBundle::trivial(d);
    let s = SectionPair::single(MatrixField::identity(d));
    let f = ScalarField::from_real_fn(d, |p| shift + p[0]);
    build_pair("p", &b, &s, &f, &PairOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn padding_leaves_any_word_unchanged(
        coeffs in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 2..8),
        shift in 0.1..2.0f64,
    ) {
        let len = coeffs.len() / 2 * 2;
        prop_assume!(len >= 2);
        let d = GridDomain::interval(0.0, 1.0, 9).unwrap();
        let pair = shifted_pair(&d, shift);
        let z: Vec<ScalarField> = coeffs[..len]
            .iter()
            .map(|&(a, b)| ScalarField::from_real_fn(&d, |p| a + b * p[0]))
            .collect();
        let base = psi_eval(&z, &pair).unwrap();
        let mut padded = z.clone();
        padded.extend(PADDING_WORD.iter().map(|&v| ScalarField::constant(&d, C64::new(v, 0.0))));
        let scale = base.values().iter().map(|m| m.op_norm()).fold(1.0, f64::max);
        prop_assert!(psi_eval(&padded, &pair).unwrap().sup_dist(&base) <= 1e-12 * scale * scale);
    }

    #[test]
    fn tampering_is_localized(sample in 0usize..64, factor in 0usize..8, bump in 1e-6..1e-2f64) {
        let (p, cert) = circle();
        let mut cert = cert.clone();
        let i = factor % cert.factors.len();
        let mut h = cert.factors[i].h.to_scalar().unwrap();
        h.values_mut()[sample] += C64::new(bump, 0.0);
        cert.factors[i].h = FieldV1::from_scalar(&h);
        let rep = verify_certificate(&p.f, &p.pairs, &cert, Backend::Float, None).unwrap();
        prop_assert!(!rep.pass);
        prop_assert_eq!(rep.worst_sample, Some(sample));
    }
}

#[test]
fn problem_json_roundtrip_preserves_digest() {
    for p in [circle_problem(32, 9), degenerate_problem(21)] {
        let back = Problem::from_json(&p.to_json()).unwrap();
        assert_eq!(back.digest, p.digest);
        assert_eq!(back.f.sup_dist(&p.f), 0.0);
    }
}

#[test]
fn certificate_json_roundtrip_verifies() {
    let (p, cert) = circle();
    let back = Certificate::from_json(&cert.to_json()).unwrap();
    assert_eq!(back.to_json(), cert.to_json());
    let rep = verify_certificate(&p.f, &p.pairs, &back, Backend::Float, Some(&p.digest)).unwrap();
    assert!(rep.pass && rep.digest_matches == Some(true), "{rep:?}");
}

#[test]
fn degenerate_factors_vanish_on_zero_set() {
    for n in [21, 41, 61] {
        let p = degenerate_problem(n);
        let cert = run(&p);
        let rep = verify_certificate(&p.f, &p.pairs, &cert, Backend::Exact, Some(&p.digest)).unwrap();
        assert!(rep.pass, "n = {n}: {rep:?}");
        let f = p.pairs[0].f();
        let zeros: Vec<usize> = (0..f.len()).filter(|&i| f.get(i).norm() <= 1e-12).collect();
        assert!(!zeros.is_empty());
        for fct in cert.factors.iter().filter(|c| c.stage != Stage::Padding) {
            let h = fct.h.to_scalar().unwrap();
            for &i in &zeros {
                assert!(h.get(i).norm() <= 1e-10, "n = {n}, sample {i}");
            }
        }
    }
}
