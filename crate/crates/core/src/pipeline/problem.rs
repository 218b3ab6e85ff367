//! The `problem-v1` input: bundle, pairs, `F` and its null-homotopy.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::bundle::{build_pair, BundleV1, ChartBundle, NilpotentPair, PairOptions, PairV1};
use crate::fields::io::FieldV1;
use crate::fields::{HomotopyField, MatrixField};

pub const PROBLEM_FORMAT: &str = "problem-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyV1 {
    pub times: Vec<f64>,
    pub frames: Vec<FieldV1>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemV1 {
    pub format: String,
    pub bundle: BundleV1,
    pub pairs: Vec<PairV1>,
    pub f: FieldV1,
    pub homotopy: HomotopyV1,
}

impl ProblemV1 {
    /// SHA-256 of the canonical JSON serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("problem serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub bundle: ChartBundle,
    pub pairs: Vec<NilpotentPair>,
    pub f: MatrixField,
    pub f_t: HomotopyField,
    pub digest: String,
}

impl Problem {
    pub fn new(bundle: ChartBundle, pairs: Vec<NilpotentPair>, f: MatrixField, f_t: HomotopyField) -> Self {
        let mut p = Problem {
            bundle,
            pairs,
            f,
            f_t,
            digest: String::new(),
        };
        p.digest = p.to_v1().digest();
        p
    }

    pub fn from_v1(v: &ProblemV1, opts: &PairOptions) -> Result<Self, PipelineError> {
        if v.format != PROBLEM_FORMAT {
            return Err(PipelineError::Input(format!("expected format {PROBLEM_FORMAT}, found {}", v.format)));
        }
        let bundle = v.bundle.to_bundle()?;
        let mut pairs = Vec::with_capacity(v.pairs.len());
        for pv in &v.pairs {
            let (id, sections, f) = pv.inputs()?;
            if pairs.iter().any(|p: &NilpotentPair| p.id == id) {
                return Err(PipelineError::Input(format!("duplicate pair id `{id}`")));
            }
            pairs.push(build_pair(&id, &bundle, &sections, &f, opts)?);
        }
        let f = v.f.to_matrix()?;
        let frames = v
            .homotopy
            .frames
            .iter()
            .map(|fr| fr.to_matrix())
            .collect::<Result<Vec<_>, _>>()?;
        let f_t = HomotopyField::new(v.homotopy.times.clone(), frames)?;
        if f.domain() != bundle.domain() || f_t.domain() != bundle.domain() {
            return Err(PipelineError::Input("F, its homotopy and the bundle must share one domain".into()));
        }
        Ok(Problem {
            bundle,
            pairs,
            f,
            f_t,
            digest: v.digest(),
        })
    }

    pub fn to_v1(&self) -> ProblemV1 {
        ProblemV1 {
            format: PROBLEM_FORMAT.into(),
            bundle: BundleV1::from_bundle(&self.bundle),
            pairs: self.pairs.iter().map(PairV1::from_pair).collect(),
            f: FieldV1::from_matrix(&self.f),
            homotopy: HomotopyV1 {
                times: self.f_t.times().to_vec(),
                frames: self.f_t.frames().iter().map(FieldV1::from_matrix).collect(),
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let v: ProblemV1 = serde_json::from_str(text)?;
        Self::from_v1(&v, &PairOptions::default())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_v1()).expect("problem serializes")
    }

    pub fn pair(&self, id: &str) -> Option<&NilpotentPair> {
        self.pairs.iter().find(|p| p.id == id)
    }
}
