//! Rank-2 bundles given by charts and transition cocycles.

use std::collections::BTreeMap;

use serde::Serialize;

use super::BundleError;
use crate::fields::{GridDomain, MatrixField, Region, ScalarField};
use crate::linalg::CMat;

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub id: String,
    pub region: Region,
}

/// Charts covering a grid domain with transitions `f_ij` taking chart-`j`
/// coordinates to chart-`i` coordinates on overlaps.
///
/// Every sample has a home chart (the first chart containing it); bundle
/// automorphisms and endomorphisms are stored in home-chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartBundle {
    domain: GridDomain,
    charts: Vec<Chart>,
    transitions: BTreeMap<(usize, usize), MatrixField>,
    home: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CocycleReport {
    /// `max ‖f_ik − f_ij f_jk‖` over triple overlaps.
    pub max_cocycle_error: f64,
    /// `max |α_ik − α_ij α_jk|` for the determinant cocycle.
    pub max_det_cocycle_error: f64,
    pub triples_checked: usize,
}

impl ChartBundle {
    /// One chart covering the domain.
    pub fn trivial(domain: &GridDomain) -> Self {
        ChartBundle {
            domain: domain.clone(),
            charts: vec![Chart {
                id: "U0".into(),
                region: Region::full(domain.len()),
            }],
            transitions: BTreeMap::new(),
            home: vec![0; domain.len()],
        }
    }

    /// Validates coverage and transitions. A missing `f_ji` is filled in as
    /// the pointwise inverse of `f_ij` on the overlap.
    pub fn new(
        domain: &GridDomain,
        charts: Vec<Chart>,
        transitions: Vec<((usize, usize), MatrixField)>,
    ) -> Result<Self, BundleError> {
        if charts.is_empty() {
            return Err(BundleError::Invalid("no charts".into()));
        }
        for c in &charts {
            if c.region.len() != domain.len() {
                return Err(BundleError::Invalid(format!("chart {} has wrong mask length", c.id)));
            }
        }
        let mut home = Vec::with_capacity(domain.len());
        for idx in 0..domain.len() {
            match charts.iter().position(|c| c.region.contains(idx)) {
                Some(k) => home.push(k),
                None => return Err(BundleError::Uncovered(idx)),
            }
        }
        let mut map = BTreeMap::new();
        for ((i, j), f) in transitions {
            if i >= charts.len() || j >= charts.len() || i == j {
                return Err(BundleError::Invalid(format!("bad transition index ({i},{j})")));
            }
            if f.domain() != domain {
                return Err(BundleError::Invalid("transition on a different domain".into()));
            }
            map.insert((i, j), f);
        }
        let n = charts.len();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let overlap = charts[i].region.intersect(&charts[j].region);
                if overlap.is_empty() || map.contains_key(&(i, j)) {
                    continue;
                }
                let Some(fji) = map.get(&(j, i)) else {
                    return Err(BundleError::Invalid(format!(
                        "charts {} and {} overlap without a transition",
                        charts[i].id, charts[j].id
                    )));
                };
                let mut vals = vec![CMat::identity(); domain.len()];
                for idx in overlap.indices() {
                    vals[idx] = fji
                        .get(idx)
                        .inverse()
                        .map_err(|_| BundleError::SingularTransition { i: j, j: i, sample: idx })?;
                }
                map.insert((i, j), MatrixField::new(domain.clone(), vals)?);
            }
        }
        for (&(i, j), f) in &map {
            let overlap = charts[i].region.intersect(&charts[j].region);
            for idx in overlap.indices() {
                if f.get(idx).det().norm() <= 1e-14 {
                    return Err(BundleError::SingularTransition { i, j, sample: idx });
                }
            }
        }
        Ok(ChartBundle {
            domain: domain.clone(),
            charts,
            transitions: map,
            home,
        })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn num_charts(&self) -> usize {
        self.charts.len()
    }

    pub fn home(&self, idx: usize) -> usize {
        self.home[idx]
    }

    pub fn home_charts(&self) -> &[usize] {
        &self.home
    }

    pub fn transitions(&self) -> &BTreeMap<(usize, usize), MatrixField> {
        &self.transitions
    }

    /// `f_ij` at a sample in the overlap of charts `i` and `j`.
    pub fn transition_at(&self, i: usize, j: usize, idx: usize) -> CMat {
        if i == j {
            return CMat::identity();
        }
        self.transitions
            .get(&(i, j))
            .map(|f| f.get(idx).clone())
            .unwrap_or_else(CMat::identity)
    }

    /// Determinant cocycle `α_ij = det f_ij`.
    pub fn determinant_cocycle(&self, i: usize, j: usize) -> ScalarField {
        match self.transitions.get(&(i, j)) {
            Some(f) => f.det(),
            None => ScalarField::constant(&self.domain, num_complex::Complex64::new(1.0, 0.0)),
        }
    }

    /// Expresses an endomorphism given in home coordinates in chart `k`.
    pub fn home_to_chart(&self, k: usize, idx: usize, m: &CMat) -> CMat {
        let h = self.home[idx];
        if h == k {
            return m.clone();
        }
        let f_kh = self.transition_at(k, h, idx);
        let f_hk = self.transition_at(h, k, idx);
        f_kh.mul_ref(m).mul_ref(&f_hk)
    }

    /// Expresses an endomorphism given in chart `k` in home coordinates.
    pub fn chart_to_home(&self, k: usize, idx: usize, m: &CMat) -> CMat {
        let h = self.home[idx];
        if h == k {
            return m.clone();
        }
        let f_hk = self.transition_at(h, k, idx);
        let f_kh = self.transition_at(k, h, idx);
        f_hk.mul_ref(m).mul_ref(&f_kh)
    }

    /// Checks `f_ik = f_ij f_jk` on all triple overlaps (including the
    /// degenerate triples `f_ij f_ji = Id`).
    pub fn check_cocycle(&self) -> CocycleReport {
        let n = self.charts.len();
        let mut worst = 0.0f64;
        let mut worst_det = 0.0f64;
        let mut triples = 0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j && j == k {
                        continue;
                    }
                    let ov = self.charts[i]
                        .region
                        .intersect(&self.charts[j].region)
                        .intersect(&self.charts[k].region);
                    if ov.is_empty() {
                        continue;
                    }
                    triples += 1;
                    for idx in ov.indices() {
                        let fik = self.transition_at(i, k, idx);
                        let fij = self.transition_at(i, j, idx);
                        let fjk = self.transition_at(j, k, idx);
                        worst = worst.max(fik.dist(&fij.mul_ref(&fjk)));
                        worst_det = worst_det.max((fik.det() - fij.det() * fjk.det()).norm());
                    }
                }
            }
        }
        CocycleReport {
            max_cocycle_error: worst,
            max_det_cocycle_error: worst_det,
            triples_checked: triples,
        }
    }

    /// Converts a field of per-chart matrices (chart `k` valid on its region)
    /// into home coordinates.
    pub fn home_field(&self, per_chart: &[MatrixField]) -> Result<MatrixField, BundleError> {
        if per_chart.len() != self.charts.len() {
            return Err(BundleError::Invalid("one field per chart is required".into()));
        }
        let vals = (0..self.domain.len())
            .map(|idx| per_chart[self.home[idx]].get(idx).clone())
            .collect();
        Ok(MatrixField::new(self.domain.clone(), vals)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C64;

    fn two_chart() -> ChartBundle {
        let d = GridDomain::interval(-1.0, 1.0, 21).unwrap();
        let left = Region::from_fn(d.len(), |i| d.coords(i)[0] <= 0.25);
        let right = Region::from_fn(d.len(), |i| d.coords(i)[0] >= -0.25);
        let t = MatrixField::from_fn(&d, |p| {
            CMat::new(C64::new(1.0, 0.0), C64::new(p[0], 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0))
        });
        ChartBundle::new(
            &d,
            vec![Chart { id: "L".into(), region: left }, Chart { id: "R".into(), region: right }],
            vec![((1, 0), t)],
        )
        .unwrap()
    }

    #[test]
    fn missing_inverse_transition_is_filled() {
        let b = two_chart();
        let idx = 10;
        let p = b.transition_at(0, 1, idx).mul_ref(&b.transition_at(1, 0, idx));
        assert!(p.dist_to_identity() < 1e-15);
        let r = b.check_cocycle();
        assert!(r.max_cocycle_error < 1e-15 && r.triples_checked > 0);
        assert!(r.max_det_cocycle_error < 1e-15);
    }

    #[test]
    fn home_conversion_roundtrip() {
        let b = two_chart();
        let m = CMat::new(C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 1.0), C64::new(7.0, 0.0));
        for idx in 0..21 {
            for k in 0..2 {
                let inside = b.charts()[k].region.contains(idx);
                if !inside {
                    continue;
                }
                let back = b.chart_to_home(k, idx, &b.home_to_chart(k, idx, &m));
                assert!(back.dist(&m) < 1e-13);
            }
        }
        assert_eq!(b.home(0), 0);
        assert_eq!(b.home(20), 1);
    }

    #[test]
    fn uncovered_and_unglued_charts_are_rejected() {
        let d = GridDomain::interval(0.0, 1.0, 5).unwrap();
        let half = Region::from_fn(5, |i| i < 3);
        let err = ChartBundle::new(&d, vec![Chart { id: "A".into(), region: half.clone() }], vec![]);
        assert!(matches!(err, Err(BundleError::Uncovered(3))));
        let other = Region::from_fn(5, |i| i >= 2);
        let err = ChartBundle::new(
            &d,
            vec![Chart { id: "A".into(), region: half }, Chart { id: "B".into(), region: other }],
            vec![],
        );
        assert!(matches!(err, Err(BundleError::Invalid(_))));
    }
}
