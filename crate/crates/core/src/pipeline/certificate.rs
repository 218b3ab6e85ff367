//! The `cert-v1` factorization certificate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::{PipelineError, Stage};
use crate::bundle::{Replica, Sign};
use crate::fields::io::FieldV1;

pub const CERT_FORMAT: &str = "cert-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertFactor {
    pub pair: String,
    pub sign: Sign,
    pub stage: Stage,
    /// Index of the split factor this replica belongs to; `None` for padding.
    pub split_factor: Option<usize>,
    pub h: FieldV1,
}

impl CertFactor {
    pub fn from_replica(r: &Replica, stage: Stage, split_factor: Option<usize>) -> Self {
        CertFactor {
            pair: r.pair.clone(),
            sign: r.sign,
            stage,
            split_factor,
            h: FieldV1::from_scalar(&r.h),
        }
    }

    pub fn replica(&self) -> Result<Replica, PipelineError> {
        Ok(Replica::new(&self.pair, self.sign, self.h.to_scalar()?))
    }
}

/// Metrics recorded by one stage on one split factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub split_factor: Option<usize>,
    pub replicas: usize,
    pub metrics: BTreeMap<String, f64>,
}

impl StageRecord {
    pub fn new(stage: Stage, split_factor: Option<usize>, replicas: usize) -> Self {
        StageRecord {
            stage,
            split_factor,
            replicas,
            metrics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub format: String,
    pub input_digest: String,
    pub config: RunConfig,
    pub factor_count: usize,
    /// `sup ‖∏ U_k − F‖` at emission time.
    pub max_residual: f64,
    /// Allowed replay residual, `tol·max(K, 1)`.
    pub tolerance: f64,
    pub stages: Vec<StageRecord>,
    pub factors: Vec<CertFactor>,
}

impl Certificate {
    pub fn replicas(&self) -> Result<Vec<Replica>, PipelineError> {
        self.factors.iter().map(CertFactor::replica).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let c: Certificate = serde_json::from_str(text)?;
        if c.format != CERT_FORMAT {
            return Err(PipelineError::Input(format!("expected format {CERT_FORMAT}, found {}", c.format)));
        }
        if c.factor_count != c.factors.len() {
            return Err(PipelineError::Input(format!(
                "factor_count {} does not match {} listed factors",
                c.factor_count,
                c.factors.len()
            )));
        }
        Ok(c)
    }
}
