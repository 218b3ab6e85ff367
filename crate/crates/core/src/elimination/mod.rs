//! Explicit factorization kernels: elimination quads, localization near the
//! zero set, homotopy flattening, SU(2) reduction, subdivision and the
//! near-identity factorization.

pub mod flatten;
pub mod frame;
pub mod facts;
pub mod localize;
pub mod near_identity;
pub mod quad;
pub mod su2;
pub mod subdivide;

use thiserror::Error;

use crate::bundle::BundleError;
use crate::fields::FieldError;
use crate::linalg::LinalgError;

pub use flatten::{flatten_homotopy, FlattenResult};
pub use frame::{replica_direct, replica_from_frame, replica_product, sign_of, SFrame};
pub use facts::{random_divisible_product, verify_divisibility_facts, verify_entry_inference, EntryInference, DivisibilityReport};
pub use localize::{localize_to_identity, Localization};
pub use near_identity::{factor_near_identity, NearIdentityResult};
pub use quad::{
    eliminate_four, eliminate_four_divisible, eliminate_four_divisible_at, whitehead_diag,
    whitehead_standard, whitehead_uncorrected, EliminationQuad,
};
pub use su2::{reduce_to_su2, Su2Reduction};
pub use subdivide::{subdivide_homotopy, SubdivisionResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElimError {
    #[error("pivot |a| = {pivot:e} is below {delta:e}")]
    SmallPivot { pivot: f64, delta: f64 },
    #[error("determinant differs from one by {det_error:e}")]
    NotSpecial { det_error: f64 },
    #[error("pivot 1 + f³ f_i a vanishes{}", .sample.map(|s| format!(" at sample {s}")).unwrap_or_default())]
    PivotVanishes { sample: Option<usize> },
    #[error("diagonal entry must be nonzero")]
    ZeroEigenvalue,
    #[error("the cover does not contain the zero set (sample {sample})")]
    CoverDoesNotContainZeroSet { sample: usize },
    #[error("homotopy is not the identity near the zero set (sample {sample}, frame {frame})")]
    NotIdentityNearZeroSet { sample: usize, frame: usize },
    #[error("cannot reach step closeness {epsilon}: frames {frame} and {next} are {gap:.4} apart")]
    CannotSatisfy { epsilon: f64, frame: usize, next: usize, gap: f64 },
    #[error("divisibility check failed: {0}")]
    Divisibility(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}
