//! Splitting a null-homotopic automorphism into factors that are the identity
//! on the zero sets of given functions, and tapering those factors so their
//! deviation from the identity decays to fourth order there.

pub mod split;
pub mod taper;

use thiserror::Error;

use crate::fields::{FieldError, HomotopyField, MatrixField, PolyError};
use crate::linalg::LinalgError;

pub use split::{split_general, split_two, SplitOptions};
pub use taper::{upgrade_divisibility, upgrade_divisibility_exact, TaperOptions, TaperReport};

/// A factor `G` with a homotopy from `Id` to `G` that is frozen at `Id` on
/// the zero set of function number `marker`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuitableFactor {
    pub g: MatrixField,
    pub homotopy: HomotopyField,
    pub marker: usize,
}

impl SuitableFactor {
    /// `max ‖G_t − Id‖` over all frames on `region`.
    pub fn max_deviation_on(&self, region: &crate::fields::Region) -> f64 {
        let mut worst = 0.0f64;
        for frame in self.homotopy.frames() {
            for idx in region.indices() {
                worst = worst.max(frame.get(idx).dist_to_identity());
            }
        }
        worst
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplitError {
    #[error("at least one function is required")]
    NoFunctions,
    #[error("the zero sets of the two functions meet at sample {sample}")]
    ZeroSetsIntersect { sample: usize },
    #[error("the functions have a common zero at sample {sample}")]
    CommonZero { sample: usize },
    #[error("no neighbourhood of the common zeros of the first {m} functions avoids the zeros of the last one")]
    NoSeparatingNeighborhood { m: usize },
    #[error("homotopy does not start at Id or end at F (deviation {deviation:e})")]
    BadHomotopy { deviation: f64 },
    #[error("cannot taper factor {factor}: {reason}")]
    CannotTaper { factor: usize, reason: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
