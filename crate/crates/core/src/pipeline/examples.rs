//! Shipped example problems.

use super::problem::Problem;
use crate::bundle::{build_pair, Chart, ChartBundle, PairOptions, SectionPair};
use crate::fields::{GridDomain, HomotopyField, MatrixField, Region, ScalarField};
use crate::linalg::CMat;
use crate::scalar::C64;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Circle of `n` periodic samples, trivial bundle, standard pair with
/// `f ≡ 1`, `F = diag(e^{ig}, e^{−ig})` with `g = 1.5·sin θ + 0.5·cos 2θ`,
/// and `F_t = diag(e^{itg}, e^{−itg})` on `frames` equally spaced times.
pub fn circle_problem(n: usize, frames: usize) -> Problem {
    let d = GridDomain::circle(n).expect("n ≥ 2");
    let bundle = ChartBundle::trivial(&d);
    let sections = SectionPair::single(MatrixField::identity(&d));
    let f = ScalarField::constant(&d, c(1.0));
    let pair = build_pair("std", &bundle, &sections, &f, &PairOptions::default()).expect("standard pair");
    let g = |p: [f64; 2]| 1.5 * p[0].sin() + 0.5 * (2.0 * p[0]).cos();
    let at = |t: f64| {
        MatrixField::from_fn(&d, |p| {
            let a = t * g(p);
            CMat::diag(C64::from_polar(1.0, a), C64::from_polar(1.0, -a))
        })
    };
    let f_t = HomotopyField::from_fn(frames, at).expect("at least two frames");
    let big_f = f_t.last().clone();
    Problem::new(bundle, vec![pair], big_f, f_t)
}

/// Interval `[−1, 1]` with two charts glued by a constant upper-triangular
/// transition, sections `[[1, x], [0, x]]` that degenerate at `x = 0`,
/// `f = x`, and `F = Id + f⁴·E` with `E = [[1, −1], [1, −1]]`, homotopy
/// `F_t = Id + t·f⁴·E`.
pub fn degenerate_problem(n: usize) -> Problem {
    let d = GridDomain::interval(-1.0, 1.0, n).expect("n ≥ 2");
    let left = Region::from_fn(d.len(), |i| d.coords(i)[0] <= 0.3);
    let right = Region::from_fn(d.len(), |i| d.coords(i)[0] >= -0.3);
    let t = CMat::new(c(2.0), c(1.0), c(0.0), c(0.5));
    let bundle = ChartBundle::new(
        &d,
        vec![
            Chart { id: "L".into(), region: left },
            Chart { id: "R".into(), region: right },
        ],
        vec![((1, 0), MatrixField::from_fn(&d, |_| t.clone()))],
    )
    .expect("valid two-chart bundle");
    let s0 = MatrixField::from_fn(&d, |p| CMat::new(c(1.0), c(p[0]), c(0.0), c(p[0])));
    let s1 = s0.map(|m| t.mul_ref(m));
    let sections = SectionPair { sections: vec![s0, s1] };
    let f = ScalarField::from_real_fn(&d, |p| p[0]);
    let pair = build_pair("deg", &bundle, &sections, &f, &PairOptions::default()).expect("degenerate pair");
    let e = CMat::new(c(1.0), c(-1.0), c(1.0), c(-1.0));
    let at = |tt: f64| MatrixField::from_fn(&d, |p| CMat::identity().add_ref(&e.scale(&c(tt * p[0].powi(4)))));
    let f_t = HomotopyField::from_fn(9, at).expect("nine frames");
    let big_f = f_t.last().clone();
    Problem::new(bundle, vec![pair], big_f, f_t)
}
