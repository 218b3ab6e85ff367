//! Sampled grid domains and point regions on them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::FieldError;

/// Tensor grid of dimension 1 or 2. Points are numbered row-major with the
/// first axis varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    axes: Vec<Vec<f64>>,
    periodic: Vec<bool>,
}

impl GridDomain {
    pub fn new(axes: Vec<Vec<f64>>, periodic: Vec<bool>) -> Result<Self, FieldError> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(FieldError::Domain(format!(
                "dimension must be 1 or 2, got {}",
                axes.len()
            )));
        }
        if periodic.len() != axes.len() {
            return Err(FieldError::Domain(
                "one periodic flag per axis is required".into(),
            ));
        }
        for (i, ax) in axes.iter().enumerate() {
            if ax.len() < 2 {
                return Err(FieldError::Domain(format!("axis {i} has fewer than 2 points")));
            }
            if ax.iter().any(|x| !x.is_finite()) {
                return Err(FieldError::Domain(format!("axis {i} has non-finite samples")));
            }
            if ax.windows(2).any(|w| w[1] <= w[0]) {
                return Err(FieldError::Domain(format!("axis {i} is not strictly increasing")));
            }
        }
        Ok(GridDomain { axes, periodic })
    }

    /// `n` equispaced samples on `[a, b]`, endpoints included.
    pub fn interval(a: f64, b: f64, n: usize) -> Result<Self, FieldError> {
        Self::new(vec![linspace(a, b, n)], vec![false])
    }

    /// `n × n` equispaced samples on `[a, b]²`.
    pub fn square(a: f64, b: f64, n: usize) -> Result<Self, FieldError> {
        let ax = linspace(a, b, n);
        Self::new(vec![ax.clone(), ax], vec![false, false])
    }

    /// `n` equispaced angles `2πk/n` on the periodic circle.
    pub fn circle(n: usize) -> Result<Self, FieldError> {
        let ax = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
        Self::new(vec![ax], vec![true])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn shape(&self) -> (usize, usize) {
        if self.axes.len() == 1 {
            (self.axes[0].len(), 1)
        } else {
            (self.axes[0].len(), self.axes[1].len())
        }
    }

    pub fn len(&self) -> usize {
        let (a, b) = self.shape();
        a * b
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, idx: usize) -> (usize, usize) {
        let (_, n1) = self.shape();
        (idx / n1, idx % n1)
    }

    pub fn flat_index(&self, i: usize, j: usize) -> usize {
        let (_, n1) = self.shape();
        i * n1 + j
    }

    /// Coordinates of a point; the second entry is 0 in dimension 1.
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.multi_index(idx);
        if self.axes.len() == 1 {
            [self.axes[0][i], 0.0]
        } else {
            [self.axes[0][i], self.axes[1][j]]
        }
    }

    /// Period of a periodic axis: its span plus one leading spacing.
    fn period(&self, axis: usize) -> f64 {
        let ax = &self.axes[axis];
        ax[ax.len() - 1] - ax[0] + (ax[1] - ax[0])
    }

    fn step(&self, axis: usize, i: usize, delta: isize) -> Option<(usize, f64)> {
        let ax = &self.axes[axis];
        let n = ax.len() as isize;
        let j = i as isize + delta;
        if (0..n).contains(&j) {
            let j = j as usize;
            return Some((j, (ax[j] - ax[i]).abs()));
        }
        if !self.periodic[axis] {
            return None;
        }
        let wrapped = j.rem_euclid(n) as usize;
        let dist = (ax[wrapped] - ax[i]).abs();
        let dist = (self.period(axis) - dist).abs();
        Some((wrapped, dist))
    }

    /// Grid neighbours (8-neighbourhood in 2D) with physical edge lengths.
    pub fn neighbors(&self, idx: usize) -> Vec<(usize, f64)> {
        let (i, j) = self.multi_index(idx);
        let mut out = Vec::with_capacity(8);
        if self.axes.len() == 1 {
            for d in [-1isize, 1] {
                if let Some((k, len)) = self.step(0, i, d) {
                    out.push((k, len));
                }
            }
            return out;
        }
        for di in [-1isize, 0, 1] {
            for dj in [-1isize, 0, 1] {
                if di == 0 && dj == 0 {
                    continue;
                }
                let a = if di == 0 { Some((i, 0.0)) } else { self.step(0, i, di) };
                let b = if dj == 0 { Some((j, 0.0)) } else { self.step(1, j, dj) };
                if let (Some((ni, li)), Some((nj, lj))) = (a, b) {
                    out.push((self.flat_index(ni, nj), (li * li + lj * lj).sqrt()));
                }
            }
        }
        out
    }

    /// Shortest-path distance from every point to `region` along grid
    /// edges, `∞` when the region is empty.
    pub fn distance_to(&self, region: &Region) -> Vec<f64> {
        let n = self.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for i in region.indices() {
            dist[i] = 0.0;
            heap.push(HeapItem { d: 0.0, idx: i });
        }
        while let Some(HeapItem { d, idx }) = heap.pop() {
            if d > dist[idx] {
                continue;
            }
            for (nb, len) in self.neighbors(idx) {
                let nd = d + len;
                if nd < dist[nb] {
                    dist[nb] = nd;
                    heap.push(HeapItem { d: nd, idx: nb });
                }
            }
        }
        dist
    }

    /// Points within `radius` grid cells (Chebyshev index distance) of
    /// `region`, honouring periodic axes.
    pub fn dilate(&self, region: &Region, radius: usize) -> Region {
        let mut out = region.clone();
        if radius == 0 {
            return out;
        }
        let (n0, n1) = self.shape();
        let r = radius as isize;
        let wrap = |k: isize, n: usize, periodic: bool| -> Option<usize> {
            if (0..n as isize).contains(&k) {
                Some(k as usize)
            } else if periodic {
                Some(k.rem_euclid(n as isize) as usize)
            } else {
                None
            }
        };
        for idx in region.indices() {
            let (i, j) = self.multi_index(idx);
            for di in -r..=r {
                let Some(ni) = wrap(i as isize + di, n0, self.periodic[0]) else {
                    continue;
                };
                if self.axes.len() == 1 {
                    out.set(ni, true);
                    continue;
                }
                for dj in -r..=r {
                    if let Some(nj) = wrap(j as isize + dj, n1, self.periodic[1]) {
                        out.set(self.flat_index(ni, nj), true);
                    }
                }
            }
        }
        out
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![a; n];
    }
    (0..n)
        .map(|k| {
            if k == n - 1 {
                b
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

#[derive(PartialEq)]
struct HeapItem {
    d: f64,
    idx: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .d
            .total_cmp(&self.d)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A set of grid points, stored as a mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    mask: Vec<bool>,
}

impl Region {
    pub fn empty(n: usize) -> Self {
        Region { mask: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        Region { mask: vec![true; n] }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Region { mask }
    }

    pub fn from_fn<F: Fn(usize) -> bool>(n: usize, f: F) -> Self {
        Region {
            mask: (0..n).map(f).collect(),
        }
    }

    /// Points whose index lies in `range` along each axis (end exclusive).
    pub fn from_box(domain: &GridDomain, ranges: &[(usize, usize)]) -> Self {
        Region::from_fn(domain.len(), |idx| {
            let (i, j) = domain.multi_index(idx);
            let in0 = ranges.first().is_none_or(|&(a, b)| (a..b).contains(&i));
            let in1 = ranges.get(1).is_none_or(|&(a, b)| (a..b).contains(&j));
            in0 && in1
        })
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn set(&mut self, idx: usize, v: bool) {
        self.mask[idx] = v;
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }

    pub fn union(&self, o: &Region) -> Region {
        Region {
            mask: self.mask.iter().zip(&o.mask).map(|(a, b)| *a || *b).collect(),
        }
    }

    pub fn intersect(&self, o: &Region) -> Region {
        Region {
            mask: self.mask.iter().zip(&o.mask).map(|(a, b)| *a && *b).collect(),
        }
    }

    pub fn complement(&self) -> Region {
        Region {
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset(&self, o: &Region) -> bool {
        self.mask.iter().zip(&o.mask).all(|(a, b)| !*a || *b)
    }

    pub fn is_disjoint(&self, o: &Region) -> bool {
        self.mask.iter().zip(&o.mask).all(|(a, b)| !(*a && *b))
    }
}
