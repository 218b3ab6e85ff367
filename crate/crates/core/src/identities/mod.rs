//! Exact checks of the alternating elementary products `Q^k`, the reduced
//! equation near `f = 0`, and the fibre map `ψ`.

pub mod gradient;
pub mod psi;
pub mod qmatrix;
pub mod report;

use thiserror::Error;

use crate::bundle::BundleError;
use crate::fields::{FieldError, PolyError};

pub use gradient::{gradient_singularity_check, GradientReport, Partial};
pub use psi::{fiber_check, psi_eval, solve_boundary_vars, BoundarySolution, FiberReport, PADDING_WORD};
pub use qmatrix::{closed_forms, q_expand, q_mod_f3_check, q_vars, reduced_equation, EntryCheck, QMatrix, QModReport, ReducedEquation, MAX_K};
pub use report::{identity_report, IdentityEntry, IdentityReport, IDENTITY_REPORT_FORMAT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentityError {
    #[error("k = {k} is outside 1..={max}")]
    SizeGuard { k: usize, max: usize },
    #[error("n must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("ψ needs an even, nonempty parameter list, got {0}")]
    OddLength(usize),
    #[error("pivot 1 + f²a vanishes at sample {sample}")]
    PivotVanishes { sample: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}
