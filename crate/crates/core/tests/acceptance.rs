//! Acceptance suite. Each test prints one PASS/FAIL line for its criterion.
//!
//! Run with `cargo test -p unifactor --test acceptance -- --nocapture` to see
//! the lines.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unifactor::elimination::{
    eliminate_four, random_divisible_product, subdivide_homotopy, verify_divisibility_facts, verify_entry_inference,
    whitehead_diag, whitehead_uncorrected,
};
use unifactor::fields::{GridDomain, HomotopyField, MatrixField, Polynomial, ScalarField};
use unifactor::identities::{gradient_singularity_check, q_expand, q_mod_f3_check};
use unifactor::linalg::{exp_mat, CMat};
use unifactor::pipeline::verify::UNIPOTENCE_TOL;
use unifactor::pipeline::{
    circle_problem, exponentialize, factor_automorphism, replay, verify_certificate, Backend, Certificate, RunConfig,
};
use unifactor::scalar::{qint, C64};
use unifactor::splitting::{split_general, SplitOptions, SuitableFactor};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn report(n: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {n} [{name}]: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() < limit
}

#[test]
fn criterion_1_symbolic_identities() {
    let start = Instant::now();
    let mut ok = true;
    for k in 1..=6 {
        let r = q_mod_f3_check(k).unwrap();
        ok &= r.passes();
        let q = q_expand(k).unwrap();
        let det = &q.m.det() - &Polynomial::constant_in(&[], qint(1));
        ok &= det.is_zero();
    }
    let elapsed = start.elapsed();
    let pass = ok && within(start, Duration::from_secs(10));
    report(1, "symbolic identities", pass, format!("k = 1..6 exact, {elapsed:.2?}"));
}

fn random_c(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::new(rng.random_range(-r..r), rng.random_range(-r..r))
}

#[test]
fn criterion_2_elimination() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let a = C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
        let b = random_c(&mut rng, 1.0);
        let cc = random_c(&mut rng, 1.0);
        let m = CMat::new(a, b, cc, (c(1.0) + b * cc) / a);
        let q = eliminate_four(&m, 1e-6, 1e-10).unwrap();
        worst = worst.max(q.product().dist(&m));
    }
    let id_zero = eliminate_four(&CMat::identity(), 1e-6, 1e-10).unwrap().is_zero();

    let mut diag_worst = 0.0f64;
    let mut agree_worst = 0.0f64;
    for _ in 0..100 {
        let l = C64::from_polar(rng.random_range(0.2..3.0), rng.random_range(0.0..std::f64::consts::TAU));
        let d = CMat::diag(l, c(1.0) / l);
        let w = whitehead_diag(l).unwrap();
        diag_worst = diag_worst.max(w.product().dist(&d));
        let e = eliminate_four(&d, 1e-6, 1e-10).unwrap();
        for j in 0..4 {
            agree_worst = agree_worst.max((w.z[j] - e.z[j]).norm());
        }
    }

    let two = c(2.0);
    let target = CMat::diag(two, c(0.5));
    let uncorrected = whitehead_uncorrected(two).unwrap().product();
    let expected_defect = -(1.0f64).sqrt().powi(3);
    let defect = uncorrected.a21 - target.a21;
    let defect_ok = (defect - c(expected_defect)).norm() < 1e-12 && uncorrected.a12 == target.a12;
    let corrected_exact = whitehead_diag(two).unwrap().product() == target;

    let elapsed = start.elapsed();
    let pass = worst <= 1e-11
        && id_zero
        && diag_worst <= 1e-12
        && agree_worst <= 1e-12
        && defect_ok
        && corrected_exact
        && within(start, Duration::from_secs(5));
    report(
        2,
        "elimination",
        pass,
        format!(
            "max residual {worst:.1e}, diag {diag_worst:.1e}, agreement {agree_worst:.1e}, \
             uncorrected (2,1) defect {:.3}, corrected exact {corrected_exact}, {elapsed:.2?}",
            defect.re
        ),
    );
}

#[test]
fn criterion_3_divisibility() {
    let start = Instant::now();
    let v = Polynomial::var;
    let one = |vars: &[&str]| Polynomial::constant_in(vars, qint(1));
    let cases = [
        (v("x"), &v("y") + &one(&["y"])),
        (&v("x") * &v("y"), &(&v("x") * &v("x")) + &one(&["x"])),
        (&v("x") + &v("y"), v("y")),
    ];
    let mut facts_ok = true;
    for (f, f_i) in &cases {
        let a = &(&v("p") * &v("x")) + &v("q");
        let b = &v("q") * &v("r");
        facts_ok &= verify_divisibility_facts(&a, &b, f, f_i).passes();
    }
    let g = &v("x") + &(&v("y") * &v("y"));
    let mut inference_ok = 0;
    for seed in 0..100 {
        let len = 2 + (seed as usize % 3);
        let inst = random_divisible_product(&g, 2, &["x", "y"], len, seed);
        let e = verify_entry_inference(&inst, &g, 2);
        if e.premises && e.det_one && e.conclusion {
            inference_ok += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = facts_ok && inference_ok == 100 && within(start, Duration::from_secs(10));
    report(
        3,
        "divisibility",
        pass,
        format!("divisibility facts {facts_ok}, inference {inference_ok}/100, {elapsed:.2?}"),
    );
}

fn exp_homotopy(d: &GridDomain, frames: usize) -> (MatrixField, HomotopyField) {
    let l = |p: [f64; 2]| CMat::new(c(0.3 * p[0]), c(1.0 + p[1]), c(-0.7), c(-0.3 * p[0]));
    let h = HomotopyField::from_fn(frames, |t| MatrixField::from_fn(d, |p| exp_mat(&l(p).scale(&c(t))))).unwrap();
    (h.last().clone(), h)
}

fn product_residual(factors: &[SuitableFactor], f: &MatrixField) -> f64 {
    let mut worst = 0.0f64;
    for idx in 0..f.len() {
        let p = factors.iter().fold(CMat::identity(), |acc, s| acc.mul_ref(s.g.get(idx)));
        worst = worst.max(p.dist(f.get(idx)));
    }
    worst
}

fn marker_deviation(factors: &[SuitableFactor], fs: &[ScalarField]) -> f64 {
    factors
        .iter()
        .map(|s| s.max_deviation_on(&fs[s.marker].zero_set(1e-12)))
        .fold(0.0, f64::max)
}

#[test]
fn criterion_4_splitting() {
    let start = Instant::now();
    let d = GridDomain::square(0.0, 1.0, 128).unwrap();
    let (f, h) = exp_homotopy(&d, 9);
    // Grid coordinates of two interior columns, so the zero sets are hit exactly.
    let x31 = d.coords(d.flat_index(31, 0))[0];
    let x95 = d.coords(d.flat_index(95, 0))[0];
    let two = vec![
        ScalarField::from_real_fn(&d, |p| p[0] - x31),
        ScalarField::from_real_fn(&d, |p| p[0] - x95),
    ];
    let three = vec![
        ScalarField::from_real_fn(&d, |p| p[0] - x31),
        ScalarField::from_real_fn(&d, |p| p[1]),
        ScalarField::from_real_fn(&d, |p| p[0] - x95),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for fs in [&two, &three] {
        let m = fs.len();
        let factors = split_general(&f, &h, fs, &SplitOptions::default()).unwrap();
        let res = product_residual(&factors, &f);
        let marker = marker_deviation(&factors, fs);
        ok &= fs.iter().all(|f| !f.zero_set(1e-12).is_empty());
        ok &= factors.len() == m && res <= m as f64 * 1e-12 && marker <= 1e-12;
        detail.push(format!("m = {m}: residual {res:.1e}, markers {marker:.1e}"));
    }
    let elapsed = start.elapsed();
    let pass = ok && within(start, Duration::from_secs(30));
    report(4, "splitting", pass, format!("{}, {elapsed:.2?}", detail.join("; ")));
}

fn rotation(phi: f64) -> CMat {
    CMat::new(c(phi.cos()), c(-phi.sin()), c(phi.sin()), c(phi.cos()))
}

#[test]
fn criterion_5_subdivision() {
    let d = GridDomain::interval(0.0, 1.0, 3).unwrap();
    let rot = HomotopyField::from_fn(1001, |t| MatrixField::from_fn(&d, |_| rotation(std::f64::consts::PI * t))).unwrap();
    let steps = subdivide_homotopy(&rot, 0.5).unwrap().steps();
    let bound = 2.0 / std::f64::consts::PI * (0.25f64).asin();
    let expected = (1.0 / bound).ceil() as usize;
    let constant = HomotopyField::constant(&MatrixField::from_fn(&d, |_| rotation(0.3)), vec![0.0, 0.5, 1.0]).unwrap();
    let const_steps = subdivide_homotopy(&constant, 0.5).unwrap().steps();
    let pass = steps == 7 && expected == 7 && const_steps == 1;
    report(
        5,
        "subdivision",
        pass,
        format!("rotation by pi: {steps} steps (bound gives {expected}), constant: {const_steps}"),
    );
}

#[test]
fn criterion_6_singular_set() {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;
    for n in 2..=5 {
        let r = gradient_singularity_check(n, 1000, 100 + n as u64).unwrap();
        ok &= r.symbolic_pass && r.sample_pass && r.samples == 1000;
        detail.push(format!("n = {n}: min |grad| {:.2e}", r.min_gradient_norm));
    }
    report(6, "singular-set dichotomy", ok, format!("{}, {:.2?}", detail.join("; "), start.elapsed()));
}

fn circle_certificate() -> (unifactor::pipeline::Problem, Certificate) {
    let p = circle_problem(256, 65);
    let cert = factor_automorphism(&p.f, &p.f_t, &p.pairs, &RunConfig::default(), &p.digest).unwrap();
    (p, cert)
}

#[test]
fn criterion_7_end_to_end() {
    let start = Instant::now();
    let (p, cert) = circle_certificate();
    let elapsed = start.elapsed();

    let reloaded = Certificate::from_json(&cert.to_json()).unwrap();
    let float = verify_certificate(&p.f, &p.pairs, &reloaded, Backend::Float, Some(&p.digest)).unwrap();
    let exact = verify_certificate(&p.f, &p.pairs, &reloaded, Backend::Exact, Some(&p.digest)).unwrap();

    let e = exponentialize(&cert, &p.pairs).unwrap();
    let direct = replay(&p.pairs, &cert.replicas().unwrap()).unwrap();
    let exp_diff = e.replay().unwrap().map(|m| m.sup_dist(&direct)).unwrap_or(0.0);

    let pass = cert.max_residual <= 1e-8
        && float.max_unipotence_error <= UNIPOTENCE_TOL
        && float.pass
        && exact.pass
        && e.factor_count == cert.factor_count
        && exp_diff <= 1e-12
        && elapsed < Duration::from_secs(60);
    report(
        7,
        "end-to-end circle",
        pass,
        format!(
            "K = {}, residual {:.1e}, exact replay {:.1e}, unipotence {:.1e}, exponential drift {exp_diff:.1e}, {elapsed:.2?}",
            cert.factor_count, cert.max_residual, exact.max_residual, float.max_unipotence_error
        ),
    );
}

#[test]
fn criterion_8_determinism() {
    let (_, a) = circle_certificate();
    let (_, b) = circle_certificate();
    let (ja, jb) = (a.to_json(), b.to_json());
    report(
        8,
        "determinism",
        ja.as_bytes() == jb.as_bytes(),
        format!("{} bytes per certificate", ja.len()),
    );
}
