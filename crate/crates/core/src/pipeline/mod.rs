//! End-to-end factorization of a special automorphism into replicas, with
//! certificate emission and replay.

pub mod certificate;
pub mod config;
pub mod examples;
pub mod exponential;
pub mod factor;
pub mod plot;
pub mod problem;
pub mod verify;

use thiserror::Error;

use crate::bundle::BundleError;
use crate::elimination::ElimError;
use crate::fields::FieldError;
use crate::splitting::SplitError;

pub use certificate::{CertFactor, Certificate, StageRecord, CERT_FORMAT};
pub use config::{Backend, RunConfig};
pub use examples::{circle_problem, degenerate_problem};
pub use exponential::{exponentialize, ExpCertificate, ExpFactor, EXP_CERT_FORMAT};
pub use factor::factor_automorphism;
pub use problem::{Problem, ProblemV1, PROBLEM_FORMAT};
pub use verify::{replay, verify_certificate, Violation, VerifyReport};

/// Stage tags used for factor provenance and error reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Split,
    Taper,
    Localize,
    Flatten,
    Su2,
    Subdivision,
    NearIdentity,
    Padding,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Split => "split",
            Stage::Taper => "taper",
            Stage::Localize => "localize",
            Stage::Flatten => "flatten",
            Stage::Su2 => "su2",
            Stage::Subdivision => "subdivision",
            Stage::NearIdentity => "near-identity",
            Stage::Padding => "padding",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("F is not special: max |det F − 1| = {det_error:e}")]
    NotSpecial { det_error: f64 },
    #[error("{count} factors exceed the limit of {max}")]
    TooManyFactors { count: usize, max: usize },
    #[error("certificate references unknown pair `{0}`")]
    UnknownPair(String),
    #[error("split stage failed: {0}")]
    Split(#[from] SplitError),
    #[error("{stage} stage failed on factor {factor}: {source}")]
    Stage {
        stage: Stage,
        factor: usize,
        #[source]
        source: ElimError,
    },
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
