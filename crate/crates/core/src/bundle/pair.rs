//! Nilpotent pairs `(N⁺, N⁻)` built from two sections and a scalar `f`.

use std::collections::VecDeque;

use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::chart::ChartBundle;
use super::BundleError;
use crate::fields::{vanish_order, MatrixField, Region, ScalarField};
use crate::linalg::CMat;

/// Which member of the pair: `+` is conjugate to the upper nilpotent, `−` to
/// the lower one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Per chart, the matrix `S_i` whose columns are the two sections.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionPair {
    pub sections: Vec<MatrixField>,
}

impl SectionPair {
    /// Sections given directly in home coordinates of a single-chart bundle.
    pub fn single(s: MatrixField) -> Self {
        SectionPair { sections: vec![s] }
    }

    /// Largest violation of `S_j = f_ji S_i` on overlaps.
    pub fn compatibility_error(&self, bundle: &ChartBundle) -> f64 {
        let mut worst = 0.0f64;
        let charts = bundle.charts();
        for i in 0..charts.len() {
            for j in 0..charts.len() {
                if i == j {
                    continue;
                }
                let ov = charts[i].region.intersect(&charts[j].region);
                for idx in ov.indices() {
                    let pred = bundle
                        .transition_at(j, i, idx)
                        .mul_ref(self.sections[i].get(idx));
                    worst = worst.max(pred.dist(self.sections[j].get(idx)));
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairOptions {
    /// `|det S_i|` at or below this counts as degenerate.
    pub degenerate_tol: f64,
    /// `|f|` at or below this counts as zero.
    pub zero_tol: f64,
    /// Allowed growth of `|f_i|` near degeneracies over its size elsewhere.
    pub safety_factor: f64,
}

impl Default for PairOptions {
    fn default() -> Self {
        PairOptions {
            degenerate_tol: 1e-12,
            zero_tol: 1e-12,
            safety_factor: 10.0,
        }
    }
}

/// Chart-local data of a pair. Values outside the chart region are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PairChart {
    pub s: MatrixField,
    pub f_i: ScalarField,
    pub n_plus: MatrixField,
    pub n_minus: MatrixField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NilpotentPair {
    pub id: String,
    f: ScalarField,
    charts: Vec<PairChart>,
    home: Vec<usize>,
    zero_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub max_square: f64,
    pub max_trace: f64,
    /// Violations of `N⁻s₁ = f s₂`, `N⁻s₂ = 0`, `N⁺s₂ = f s₁`, `N⁺s₁ = 0`.
    pub max_action_error: f64,
    /// `‖S⁻¹N⁺S/f − E₁₂‖` and the lower analogue where `|f|` is not small.
    pub max_standard_error: f64,
    /// `‖N^±‖` on the zero set of `f`.
    pub max_zero_set_norm: f64,
    /// Violations of `N_j = f_ji N_i f_ij` on overlaps.
    pub max_transition_error: f64,
}

fn standard_upper(fi: C64) -> CMat {
    CMat::new(C64::zero(), fi, C64::zero(), C64::zero())
}

fn standard_lower(fi: C64) -> CMat {
    CMat::new(C64::zero(), C64::zero(), fi, C64::zero())
}

/// Builds `N⁻ = S·[[0,0],[f_i,0]]·S^#` and `N⁺ = S·[[0,f_i],[0,0]]·S^#` per
/// chart with `f_i = f / det S_i`.
///
/// Where `det S_i` vanishes on samples, `f` must vanish too and the
/// quotient is extended by averaging neighbours. Boundedness is certified on
/// samples only: `|f|` must decay at least linearly in `|det S_i|` near the
/// degenerate set, and `|f_i|` there may exceed its size away from it by at
/// most the safety factor.
pub fn build_pair(
    id: &str,
    bundle: &ChartBundle,
    sections: &SectionPair,
    f: &ScalarField,
    opts: &PairOptions,
) -> Result<NilpotentPair, BundleError> {
    let domain = bundle.domain();
    if f.domain() != domain {
        return Err(BundleError::Invalid("f lives on a different domain".into()));
    }
    if sections.sections.len() != bundle.num_charts() {
        return Err(BundleError::Invalid("one section matrix per chart is required".into()));
    }
    let mut charts = Vec::with_capacity(bundle.num_charts());
    for (k, chart) in bundle.charts().iter().enumerate() {
        let s = &sections.sections[k];
        if s.domain() != domain {
            return Err(BundleError::Invalid("sections live on a different domain".into()));
        }
        let f_i = chart_quotient(k, &chart.region, s, f, opts)?;
        let mut n_plus = vec![CMat::zero(); domain.len()];
        let mut n_minus = vec![CMat::zero(); domain.len()];
        for idx in chart.region.indices() {
            let sm = s.get(idx);
            let adj = sm.adjugate();
            let q = f_i.get(idx);
            n_plus[idx] = sm.mul_ref(&standard_upper(q)).mul_ref(&adj);
            n_minus[idx] = sm.mul_ref(&standard_lower(q)).mul_ref(&adj);
        }
        charts.push(PairChart {
            s: s.clone(),
            f_i,
            n_plus: MatrixField::new(domain.clone(), n_plus)?,
            n_minus: MatrixField::new(domain.clone(), n_minus)?,
        });
    }
    Ok(NilpotentPair {
        id: id.to_string(),
        f: f.clone(),
        charts,
        home: bundle.home_charts().to_vec(),
        zero_tol: opts.zero_tol,
    })
}

fn chart_quotient(
    k: usize,
    region: &Region,
    s: &MatrixField,
    f: &ScalarField,
    opts: &PairOptions,
) -> Result<ScalarField, BundleError> {
    let domain = s.domain();
    let n = domain.len();
    let dets: Vec<C64> = s.values().iter().map(|m| m.det()).collect();
    let mut q = vec![C64::zero(); n];
    let mut known = vec![false; n];
    let mut degenerate = Region::empty(n);
    for idx in region.indices() {
        if dets[idx].norm() <= opts.degenerate_tol {
            if f.get(idx).norm() > opts.zero_tol {
                return Err(BundleError::UnboundedQuotient { chart: k, sample: idx });
            }
            degenerate.set(idx, true);
        } else {
            q[idx] = f.get(idx) / dets[idx];
            known[idx] = true;
        }
    }
    if !degenerate.is_empty() {
        check_bounded(k, region, &degenerate, &dets, f, &q, opts)?;
        fill_by_neighbours(region, &degenerate, &mut q, &mut known, domain);
    }
    Ok(ScalarField::new(domain.clone(), q)?)
}

fn check_bounded(
    k: usize,
    region: &Region,
    degenerate: &Region,
    dets: &[C64],
    f: &ScalarField,
    q: &[C64],
    opts: &PairOptions,
) -> Result<(), BundleError> {
    let domain = f.domain();
    let max_det = region.indices().map(|i| dets[i].norm()).fold(0.0, f64::max);
    let band = 0.1 * max_det;
    if band <= 0.0 {
        // det S vanishes on the whole chart, so f does too and f_i := 0.
        return Ok(());
    }
    let masked_det: Vec<C64> = (0..domain.len())
        .map(|i| if region.contains(i) { dets[i] } else { C64::new(2.0 * band, 0.0) })
        .collect();
    let masked_f: Vec<C64> = (0..domain.len())
        .map(|i| if region.contains(i) { f.get(i) } else { C64::zero() })
        .collect();
    let det_field = ScalarField::new(domain.clone(), masked_det)?;
    let f_field = ScalarField::new(domain.clone(), masked_f)?;
    if let Ok(rep) = vanish_order(&f_field, &det_field, 1, band) {
        if !rep.passes {
            let sample = degenerate.indices().next().unwrap_or(0);
            return Err(BundleError::UnboundedQuotient { chart: k, sample });
        }
    }
    let mut near = 0.0f64;
    let mut far = 0.0f64;
    let mut near_at = 0;
    for idx in region.indices() {
        if degenerate.contains(idx) {
            continue;
        }
        let v = q[idx].norm();
        if dets[idx].norm() < band {
            if v > near {
                near = v;
                near_at = idx;
            }
        } else {
            far = far.max(v);
        }
    }
    if far > 0.0 && near > opts.safety_factor * far {
        return Err(BundleError::UnboundedQuotient { chart: k, sample: near_at });
    }
    Ok(())
}

/// Breadth-first extension: each unknown sample takes the mean of its known
/// neighbours inside the region.
fn fill_by_neighbours(
    region: &Region,
    targets: &Region,
    q: &mut [C64],
    known: &mut [bool],
    domain: &crate::fields::GridDomain,
) {
    let mut queue: VecDeque<usize> = targets.indices().collect();
    let mut stalls = 0;
    while let Some(idx) = queue.pop_front() {
        let nbs: Vec<usize> = domain
            .neighbors(idx)
            .into_iter()
            .map(|(j, _)| j)
            .filter(|&j| region.contains(j) && known[j])
            .collect();
        if nbs.is_empty() {
            queue.push_back(idx);
            stalls += 1;
            if stalls > queue.len() {
                // Isolated from every known value: leave at zero.
                for i in queue.drain(..) {
                    known[i] = true;
                }
            }
            continue;
        }
        stalls = 0;
        let sum: C64 = nbs.iter().map(|&j| q[j]).sum();
        q[idx] = sum / nbs.len() as f64;
        known[idx] = true;
    }
}

impl NilpotentPair {
    pub fn f(&self) -> &ScalarField {
        &self.f
    }

    pub fn charts(&self) -> &[PairChart] {
        &self.charts
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn home(&self, idx: usize) -> usize {
        self.home[idx]
    }

    /// `N^±` at a sample, in home coordinates.
    pub fn n_at(&self, sign: Sign, idx: usize) -> &CMat {
        let c = &self.charts[self.home[idx]];
        match sign {
            Sign::Plus => c.n_plus.get(idx),
            Sign::Minus => c.n_minus.get(idx),
        }
    }

    /// Section matrix `S` at a sample, in home coordinates.
    pub fn s_at(&self, idx: usize) -> &CMat {
        self.charts[self.home[idx]].s.get(idx)
    }

    pub fn f_i_at(&self, idx: usize) -> C64 {
        self.charts[self.home[idx]].f_i.get(idx)
    }

    /// Samples where `|f| ≤ zero_tol`.
    pub fn zero_set(&self) -> Region {
        self.f.zero_set(self.zero_tol)
    }

    /// Evaluates the pair invariants over all charts.
    pub fn report(&self, bundle: &ChartBundle) -> PairReport {
        let mut r = PairReport {
            max_square: 0.0,
            max_trace: 0.0,
            max_action_error: 0.0,
            max_standard_error: 0.0,
            max_zero_set_norm: 0.0,
            max_transition_error: 0.0,
        };
        let e12 = standard_upper(C64::new(1.0, 0.0));
        let e21 = standard_lower(C64::new(1.0, 0.0));
        for (k, chart) in bundle.charts().iter().enumerate() {
            let pc = &self.charts[k];
            for idx in chart.region.indices() {
                let (np, nm) = (pc.n_plus.get(idx), pc.n_minus.get(idx));
                let s = pc.s.get(idx);
                let f = self.f.get(idx);
                for n in [np, nm] {
                    r.max_square = r.max_square.max(n.mul_ref(n).max_abs());
                    r.max_trace = r.max_trace.max(n.trace().norm());
                }
                let s1 = CMat::new(s.a11, C64::zero(), s.a21, C64::zero());
                let s2 = CMat::new(s.a12, C64::zero(), s.a22, C64::zero());
                let errs = [
                    nm.mul_ref(&s1).dist(&s2.scale(&f)),
                    nm.mul_ref(&s2).op_norm(),
                    np.mul_ref(&s2).dist(&s1.scale(&f)),
                    np.mul_ref(&s1).op_norm(),
                ];
                for e in errs {
                    r.max_action_error = r.max_action_error.max(e);
                }
                if f.norm() <= self.zero_tol {
                    r.max_zero_set_norm = r.max_zero_set_norm.max(np.op_norm().max(nm.op_norm()));
                } else if let Ok(si) = s.inverse_tol(1e-12) {
                    let up = si.mul_ref(np).mul_ref(s).scale(&(C64::new(1.0, 0.0) / f));
                    let lo = si.mul_ref(nm).mul_ref(s).scale(&(C64::new(1.0, 0.0) / f));
                    r.max_standard_error = r.max_standard_error.max(up.dist(&e12)).max(lo.dist(&e21));
                }
            }
        }
        let charts = bundle.charts();
        for i in 0..charts.len() {
            for j in 0..charts.len() {
                if i == j {
                    continue;
                }
                let ov = charts[i].region.intersect(&charts[j].region);
                for idx in ov.indices() {
                    let fji = bundle.transition_at(j, i, idx);
                    let fij = bundle.transition_at(i, j, idx);
                    for sign in [Sign::Plus, Sign::Minus] {
                        let (ni, nj) = match sign {
                            Sign::Plus => (self.charts[i].n_plus.get(idx), self.charts[j].n_plus.get(idx)),
                            Sign::Minus => (self.charts[i].n_minus.get(idx), self.charts[j].n_minus.get(idx)),
                        };
                        let pred = fji.mul_ref(ni).mul_ref(&fij);
                        r.max_transition_error = r.max_transition_error.max(pred.dist(nj));
                    }
                }
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::chart::Chart;
    use crate::fields::GridDomain;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn standard_pair_on_trivial_bundle() {
        let d = GridDomain::interval(0.0, 1.0, 5).unwrap();
        let b = ChartBundle::trivial(&d);
        let s = SectionPair::single(MatrixField::identity(&d));
        let f = ScalarField::constant(&d, c(1.0));
        let p = build_pair("std", &b, &s, &f, &PairOptions::default()).unwrap();
        for idx in 0..d.len() {
            assert_eq!(*p.n_at(Sign::Minus, idx), standard_lower(c(1.0)));
            assert_eq!(*p.n_at(Sign::Plus, idx), standard_upper(c(1.0)));
        }
    }

    #[test]
    fn degenerate_sections_example() {
        let d = GridDomain::interval(-1.0, 1.0, 41).unwrap();
        let b = ChartBundle::trivial(&d);
        let s = SectionPair::single(MatrixField::from_fn(&d, |p| CMat::new(c(1.0), c(p[0]), c(0.0), c(p[0]))));
        let f = ScalarField::from_real_fn(&d, |p| p[0]);
        let pair = build_pair("deg", &b, &s, &f, &PairOptions::default()).unwrap();
        for idx in 0..d.len() {
            let x = d.coords(idx)[0];
            let x2 = c(x * x);
            let expect = CMat::new(x2, -x2, x2, -x2);
            assert!(pair.n_at(Sign::Minus, idx).dist(&expect) < 1e-14);
        }
        let rep = pair.report(&b);
        assert!(rep.max_square < 1e-14);
        assert!(rep.max_action_error < 1e-14);
        assert!(rep.max_standard_error < 1e-12);
        // N⁻ degenerates on {f = 0}, but N⁺ = f_i·E₁₂ with f_i ≡ 1 does not.
        assert_eq!(*pair.n_at(Sign::Minus, 20), CMat::zero());
        assert_eq!(*pair.n_at(Sign::Plus, 20), standard_upper(c(1.0)));
        assert_eq!(rep.max_zero_set_norm, 1.0);
        assert!((pair.f_i_at(20) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_function_gives_zero_pair() {
        let d = GridDomain::interval(-1.0, 1.0, 11).unwrap();
        let b = ChartBundle::trivial(&d);
        let s = SectionPair::single(MatrixField::from_fn(&d, |p| CMat::new(c(1.0), c(p[0]), c(0.0), c(p[0]))));
        let f = ScalarField::zeros(&d);
        let pair = build_pair("z", &b, &s, &f, &PairOptions::default()).unwrap();
        for idx in 0..d.len() {
            assert_eq!(*pair.n_at(Sign::Plus, idx), CMat::zero());
            assert_eq!(*pair.n_at(Sign::Minus, idx), CMat::zero());
        }
    }

    #[test]
    fn unbounded_quotients_are_rejected() {
        let d = GridDomain::interval(-1.0, 1.0, 41).unwrap();
        let b = ChartBundle::trivial(&d);
        // det S = x², f = x: f/det S blows up like 1/x.
        let s = SectionPair::single(MatrixField::from_fn(&d, |p| CMat::new(c(p[0]), c(0.0), c(0.0), c(p[0]))));
        let f = ScalarField::from_real_fn(&d, |p| p[0]);
        assert!(matches!(
            build_pair("bad", &b, &s, &f, &PairOptions::default()),
            Err(BundleError::UnboundedQuotient { .. })
        ));
        // det S = x but f ≡ 1 does not vanish where det S does.
        let s = SectionPair::single(MatrixField::from_fn(&d, |p| CMat::new(c(1.0), c(0.0), c(0.0), c(p[0]))));
        let f = ScalarField::constant(&d, c(1.0));
        assert!(matches!(
            build_pair("bad", &b, &s, &f, &PairOptions::default()),
            Err(BundleError::UnboundedQuotient { .. })
        ));
    }

    #[test]
    fn two_chart_pair_is_transition_compatible() {
        let d = GridDomain::interval(-1.0, 1.0, 41).unwrap();
        let left = Region::from_fn(d.len(), |i| d.coords(i)[0] <= 0.3);
        let right = Region::from_fn(d.len(), |i| d.coords(i)[0] >= -0.3);
        let t = CMat::new(c(2.0), c(1.0), c(0.0), c(0.5));
        let t_field = MatrixField::from_fn(&d, |_| t.clone());
        let b = ChartBundle::new(
            &d,
            vec![Chart { id: "L".into(), region: left }, Chart { id: "R".into(), region: right }],
            vec![((1, 0), t_field)],
        )
        .unwrap();
        let s0 = MatrixField::from_fn(&d, |p| CMat::new(c(1.0), c(p[0]), c(0.0), c(p[0])));
        let s1 = s0.map(|m| t.mul_ref(m));
        let sp = SectionPair { sections: vec![s0, s1] };
        assert!(sp.compatibility_error(&b) < 1e-15);
        let f = ScalarField::from_real_fn(&d, |p| p[0]);
        let pair = build_pair("two", &b, &sp, &f, &PairOptions::default()).unwrap();
        let rep = pair.report(&b);
        assert!(rep.max_transition_error < 1e-13, "{rep:?}");
        assert!(rep.max_action_error < 1e-13);
    }
}
