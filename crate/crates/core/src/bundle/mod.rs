//! Rank-2 bundles, nilpotent pairs built from sections, and replicas.

pub mod chart;
pub mod io;
pub mod pair;
pub mod replica;

use thiserror::Error;

use crate::fields::FieldError;

pub use chart::{Chart, ChartBundle, CocycleReport};
pub use io::{BundleV1, ChartV1, PairV1, TransitionV1};
pub use pair::{build_pair, NilpotentPair, PairChart, PairOptions, PairReport, SectionPair, Sign};
pub use replica::{exp_nilpotent, unipotent_log, Replica};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BundleError {
    #[error("invalid bundle data: {0}")]
    Invalid(String),
    #[error("sample {0} is not covered by any chart")]
    Uncovered(usize),
    #[error("transition ({i},{j}) is singular at sample {sample}")]
    SingularTransition { i: usize, j: usize, sample: usize },
    #[error("f / det S is unbounded on chart {chart} near sample {sample}")]
    UnboundedQuotient { chart: usize, sample: usize },
    #[error("field is not unipotent at sample {sample}")]
    NotUnipotent { sample: usize },
    #[error("unknown pair {0:?}")]
    UnknownPair(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}
