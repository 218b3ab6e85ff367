//! Scalar-, matrix- and homotopy-valued fields on a grid domain.

use num_traits::{One, Zero};

use super::grid::GridDomain;
use super::poly::Polynomial;
use super::FieldError;
use crate::linalg::{exp_mat, log_near_identity, CMat};
use crate::scalar::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: GridDomain,
    values: Vec<C64>,
}

impl ScalarField {
    pub fn new(domain: GridDomain, values: Vec<C64>) -> Result<Self, FieldError> {
        if values.len() != domain.len() {
            return Err(FieldError::Length {
                expected: domain.len(),
                got: values.len(),
            });
        }
        Ok(ScalarField { domain, values })
    }

    pub fn from_fn<F: Fn([f64; 2]) -> C64>(domain: &GridDomain, f: F) -> Self {
        let values = (0..domain.len()).map(|i| f(domain.coords(i))).collect();
        ScalarField {
            domain: domain.clone(),
            values,
        }
    }

    pub fn from_real_fn<F: Fn([f64; 2]) -> f64>(domain: &GridDomain, f: F) -> Self {
        Self::from_fn(domain, |p| C64::new(f(p), 0.0))
    }

    pub fn constant(domain: &GridDomain, c: C64) -> Self {
        ScalarField {
            domain: domain.clone(),
            values: vec![c; domain.len()],
        }
    }

    pub fn zeros(domain: &GridDomain) -> Self {
        Self::constant(domain, C64::zero())
    }

    /// Samples a polynomial whose variables are named after the axes
    /// (`axis_vars[k]` is the coordinate of axis `k`). Other variables are 0.
    pub fn sample_polynomial(
        domain: &GridDomain,
        poly: &Polynomial,
        axis_vars: &[&str],
    ) -> Result<Self, FieldError> {
        let mut values = Vec::with_capacity(domain.len());
        for i in 0..domain.len() {
            let c = domain.coords(i);
            let named: Vec<(&str, C64)> = axis_vars
                .iter()
                .enumerate()
                .map(|(k, v)| (*v, C64::new(c[k], 0.0)))
                .collect();
            values.push(poly.evaluate_named(&named)?);
        }
        Ok(ScalarField {
            domain: domain.clone(),
            values,
        })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, idx: usize) -> C64 {
        self.values[idx]
    }

    pub fn map<F: Fn(C64) -> C64>(&self, f: F) -> Self {
        ScalarField {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<F: Fn(C64, C64) -> C64>(&self, o: &ScalarField, f: F) -> Self {
        ScalarField {
            domain: self.domain.clone(),
            values: self
                .values
                .iter()
                .zip(&o.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn mul(&self, o: &ScalarField) -> Self {
        self.zip_map(o, |a, b| a * b)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Points where `|f| ≤ tol`.
    pub fn zero_set(&self, tol: f64) -> super::grid::Region {
        super::grid::Region::from_fn(self.len(), |i| self.values[i].norm() <= tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    domain: GridDomain,
    values: Vec<CMat>,
}

impl MatrixField {
    pub fn new(domain: GridDomain, values: Vec<CMat>) -> Result<Self, FieldError> {
        if values.len() != domain.len() {
            return Err(FieldError::Length {
                expected: domain.len(),
                got: values.len(),
            });
        }
        Ok(MatrixField { domain, values })
    }

    pub fn from_fn<F: Fn([f64; 2]) -> CMat>(domain: &GridDomain, f: F) -> Self {
        MatrixField {
            domain: domain.clone(),
            values: (0..domain.len()).map(|i| f(domain.coords(i))).collect(),
        }
    }

    pub fn from_index_fn<F: FnMut(usize) -> CMat>(domain: &GridDomain, f: F) -> Self {
        MatrixField {
            domain: domain.clone(),
            values: (0..domain.len()).map(f).collect(),
        }
    }

    pub fn identity(domain: &GridDomain) -> Self {
        MatrixField {
            domain: domain.clone(),
            values: vec![CMat::identity(); domain.len()],
        }
    }

    /// Assembles a field from its four entry fields, which must share a domain.
    pub fn from_entries(
        a11: &ScalarField,
        a12: &ScalarField,
        a21: &ScalarField,
        a22: &ScalarField,
    ) -> Result<Self, FieldError> {
        for e in [a12, a21, a22] {
            if e.domain() != a11.domain() {
                return Err(FieldError::DomainMismatch);
            }
        }
        let values = (0..a11.len())
            .map(|i| CMat::new(a11.get(i), a12.get(i), a21.get(i), a22.get(i)))
            .collect();
        Ok(MatrixField {
            domain: a11.domain().clone(),
            values,
        })
    }

    /// Entry `(i, j)` with 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> ScalarField {
        let pick = |m: &CMat| match (i, j) {
            (1, 1) => m.a11,
            (1, 2) => m.a12,
            (2, 1) => m.a21,
            _ => m.a22,
        };
        ScalarField {
            domain: self.domain.clone(),
            values: self.values.iter().map(pick).collect(),
        }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[CMat] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [CMat] {
        &mut self.values
    }

    pub fn get(&self, idx: usize) -> &CMat {
        &self.values[idx]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<F: Fn(&CMat) -> CMat>(&self, f: F) -> Self {
        MatrixField {
            domain: self.domain.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn map_indexed<F: Fn(usize, &CMat) -> CMat>(&self, f: F) -> Self {
        MatrixField {
            domain: self.domain.clone(),
            values: self.values.iter().enumerate().map(|(i, m)| f(i, m)).collect(),
        }
    }

    /// Pointwise product `self · o`.
    pub fn mul(&self, o: &MatrixField) -> Self {
        MatrixField {
            domain: self.domain.clone(),
            values: self
                .values
                .iter()
                .zip(&o.values)
                .map(|(a, b)| a.mul_ref(b))
                .collect(),
        }
    }

    /// Pointwise inverse; fails at the first singular sample.
    pub fn inverse(&self) -> Result<Self, FieldError> {
        let mut values = Vec::with_capacity(self.len());
        for (i, m) in self.values.iter().enumerate() {
            values.push(m.inverse().map_err(|_| FieldError::SingularSample(i))?);
        }
        Ok(MatrixField {
            domain: self.domain.clone(),
            values,
        })
    }

    pub fn det(&self) -> ScalarField {
        ScalarField {
            domain: self.domain.clone(),
            values: self.values.iter().map(|m| m.det()).collect(),
        }
    }

    /// `max_x ‖self(x) − o(x)‖` in the operator norm.
    pub fn sup_dist(&self, o: &MatrixField) -> f64 {
        self.values
            .iter()
            .zip(&o.values)
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max)
    }

    pub fn sup_dist_to_identity(&self) -> f64 {
        self.values
            .iter()
            .map(|m| m.dist_to_identity())
            .fold(0.0, f64::max)
    }

    /// Largest `|det − 1|` over the samples.
    pub fn det_drift(&self) -> f64 {
        self.values
            .iter()
            .map(|m| (m.det() - C64::one()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_sl2(&self, tol: f64) -> bool {
        self.values.iter().all(|m| m.is_sl2(tol))
    }
}

/// Frames `G_{t_0}, …, G_{t_m}` with `t_0 = 0 < … < t_m = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyField {
    times: Vec<f64>,
    frames: Vec<MatrixField>,
}

impl HomotopyField {
    pub fn new(times: Vec<f64>, frames: Vec<MatrixField>) -> Result<Self, FieldError> {
        if times.len() < 2 || times.len() != frames.len() {
            return Err(FieldError::Homotopy(
                "need at least two frames and one time per frame".into(),
            ));
        }
        if times[0] != 0.0 || *times.last().unwrap() != 1.0 {
            return Err(FieldError::Homotopy("times must start at 0 and end at 1".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FieldError::Homotopy("times must be strictly increasing".into()));
        }
        let d = frames[0].domain();
        if frames.iter().any(|f| f.domain() != d) {
            return Err(FieldError::DomainMismatch);
        }
        Ok(HomotopyField { times, frames })
    }

    /// Samples `t ↦ g(t)` at `n` equispaced times on `[0, 1]`.
    pub fn from_fn<F: Fn(f64) -> MatrixField>(n: usize, g: F) -> Result<Self, FieldError> {
        let times = super::grid::linspace(0.0, 1.0, n);
        let frames = times.iter().map(|&t| g(t)).collect();
        Self::new(times, frames)
    }

    /// Homotopy constant in time.
    pub fn constant(field: &MatrixField, times: Vec<f64>) -> Result<Self, FieldError> {
        let frames = vec![field.clone(); times.len()];
        Self::new(times, frames)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[MatrixField] {
        &self.frames
    }

    pub fn frame(&self, k: usize) -> &MatrixField {
        &self.frames[k]
    }

    pub fn last(&self) -> &MatrixField {
        self.frames.last().unwrap()
    }

    pub fn domain(&self) -> &GridDomain {
        self.frames[0].domain()
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    /// Value at sample `idx` and arbitrary time `t ∈ [0, 1]`.
    ///
    /// Between frames the homotopy follows the one-parameter subgroup
    /// `A·exp(s·log(A⁻¹B))`, which stays in SL(2) and reproduces the frames
    /// exactly at `s = 0, 1`. Neighbouring frames must satisfy
    /// `‖A⁻¹B − Id‖ ≤ 1/2`.
    pub fn eval_at(&self, idx: usize, t: f64) -> Result<CMat, FieldError> {
        let t = t.clamp(0.0, 1.0);
        let k = match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(k) => return Ok(self.frames[k].get(idx).clone()),
            Err(k) => k - 1,
        };
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let a = self.frames[k].get(idx);
        let b = self.frames[k + 1].get(idx);
        if a == b {
            return Ok(a.clone());
        }
        let s = (t - t0) / (t1 - t0);
        let step = a
            .inverse()
            .map_err(|_| FieldError::SingularSample(idx))?
            .mul_ref(b);
        let log = log_near_identity(&step).map_err(|_| FieldError::TimeSamplingTooCoarse {
            sample: idx,
            frame: k,
            gap: step.dist_to_identity(),
        })?;
        Ok(a.mul_ref(&exp_mat(&log.scale(&C64::new(s, 0.0)))))
    }

    /// Largest `‖G_{t_{k+1}} G_{t_k}⁻¹ − Id‖` over samples and frames.
    pub fn max_frame_gap(&self) -> f64 {
        let mut worst = 0.0f64;
        for w in self.frames.windows(2) {
            for (a, b) in w[0].values().iter().zip(w[1].values()) {
                if let Ok(ai) = a.inverse() {
                    worst = worst.max(b.mul_ref(&ai).dist_to_identity());
                } else {
                    return f64::INFINITY;
                }
            }
        }
        worst
    }
}
