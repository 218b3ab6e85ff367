//! JSON formats `bundle-v1` and `pair-v1`.
//!
//! Chart regions are unions of index boxes, one `[start, end)` range per
//! axis. Transitions and sections are `field-v1` blocks of kind `mat2`.

use serde::{Deserialize, Serialize};

use super::chart::{Chart, ChartBundle};
use super::pair::{NilpotentPair, SectionPair};
use super::BundleError;
use crate::fields::io::{DomainV1, FieldV1};
use crate::fields::{GridDomain, Region};

pub const BUNDLE_FORMAT: &str = "bundle-v1";
pub const PAIR_FORMAT: &str = "pair-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartV1 {
    pub id: String,
    /// Each box lists one `[start, end)` index range per axis.
    pub boxes: Vec<Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionV1 {
    pub i: usize,
    pub j: usize,
    pub field: FieldV1,
}

fn bundle_format() -> String {
    BUNDLE_FORMAT.into()
}

fn pair_format() -> String {
    PAIR_FORMAT.into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleV1 {
    #[serde(default = "bundle_format")]
    pub format: String,
    pub domain: DomainV1,
    pub charts: Vec<ChartV1>,
    #[serde(default)]
    pub transitions: Vec<TransitionV1>,
}

fn region_from_boxes(domain: &GridDomain, boxes: &[Vec<[usize; 2]>]) -> Region {
    let mut r = Region::empty(domain.len());
    for b in boxes {
        let ranges: Vec<(usize, usize)> = b.iter().map(|&[a, e]| (a, e)).collect();
        r = r.union(&Region::from_box(domain, &ranges));
    }
    r
}

/// Splits a region into boxes, one per maximal run along the last axis.
fn boxes_from_region(domain: &GridDomain, region: &Region) -> Vec<Vec<[usize; 2]>> {
    let (n0, n1) = domain.shape();
    let mut out = Vec::new();
    if domain.dim() == 1 {
        let mut i = 0;
        while i < n0 {
            if !region.contains(i) {
                i += 1;
                continue;
            }
            let start = i;
            while i < n0 && region.contains(i) {
                i += 1;
            }
            out.push(vec![[start, i]]);
        }
        return out;
    }
    for i in 0..n0 {
        let mut j = 0;
        while j < n1 {
            if !region.contains(domain.flat_index(i, j)) {
                j += 1;
                continue;
            }
            let start = j;
            while j < n1 && region.contains(domain.flat_index(i, j)) {
                j += 1;
            }
            out.push(vec![[i, i + 1], [start, j]]);
        }
    }
    out
}

impl BundleV1 {
    pub fn from_bundle(b: &ChartBundle) -> Self {
        let d = b.domain();
        BundleV1 {
            format: BUNDLE_FORMAT.into(),
            domain: DomainV1::from_domain(d),
            charts: b
                .charts()
                .iter()
                .map(|c| ChartV1 {
                    id: c.id.clone(),
                    boxes: boxes_from_region(d, &c.region),
                })
                .collect(),
            transitions: b
                .transitions()
                .iter()
                .map(|(&(i, j), f)| TransitionV1 {
                    i,
                    j,
                    field: FieldV1::from_matrix(f),
                })
                .collect(),
        }
    }

    pub fn to_bundle(&self) -> Result<ChartBundle, BundleError> {
        if self.format != BUNDLE_FORMAT {
            return Err(BundleError::Invalid(format!("expected format {BUNDLE_FORMAT}, found {}", self.format)));
        }
        let d = self.domain.to_domain()?;
        let charts = self
            .charts
            .iter()
            .map(|c| Chart {
                id: c.id.clone(),
                region: region_from_boxes(&d, &c.boxes),
            })
            .collect();
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for t in &self.transitions {
            let f = t.field.to_matrix()?;
            if *f.domain() != d {
                return Err(BundleError::Invalid("transition on a different domain".into()));
            }
            transitions.push(((t.i, t.j), f));
        }
        ChartBundle::new(&d, charts, transitions)
    }
}

/// Sections per chart and `f`; `n_plus`/`n_minus` are written for audit and
/// ignored on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairV1 {
    #[serde(default = "pair_format")]
    pub format: String,
    pub id: String,
    pub sections: Vec<FieldV1>,
    pub f: FieldV1,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_plus: Vec<FieldV1>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_minus: Vec<FieldV1>,
}

impl PairV1 {
    pub fn from_pair(p: &NilpotentPair) -> Self {
        PairV1 {
            format: PAIR_FORMAT.into(),
            id: p.id.clone(),
            sections: p.charts().iter().map(|c| FieldV1::from_matrix(&c.s)).collect(),
            f: FieldV1::from_scalar(p.f()),
            n_plus: p.charts().iter().map(|c| FieldV1::from_matrix(&c.n_plus)).collect(),
            n_minus: p.charts().iter().map(|c| FieldV1::from_matrix(&c.n_minus)).collect(),
        }
    }

    pub fn inputs(&self) -> Result<(String, SectionPair, crate::fields::ScalarField), BundleError> {
        if self.format != PAIR_FORMAT {
            return Err(BundleError::Invalid(format!("expected format {PAIR_FORMAT}, found {}", self.format)));
        }
        let sections = self
            .sections
            .iter()
            .map(|s| s.to_matrix())
            .collect::<Result<Vec<_>, _>>()?;
        Ok((self.id.clone(), SectionPair { sections }, self.f.to_scalar()?))
    }
}
