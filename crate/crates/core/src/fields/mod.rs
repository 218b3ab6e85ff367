//! Functions on sampled domains and exact polynomials.

pub mod cutoff;
pub mod divisibility;
pub mod field;
pub mod grid;
pub mod io;
pub mod poly;

use thiserror::Error;

pub use cutoff::{make_cutoff, smoothstep, CutoffFunction};
pub use divisibility::{deviation_field, vanish_order, VanishReport};
pub use field::{HomotopyField, MatrixField, ScalarField};
pub use grid::{GridDomain, Region};
pub use poly::{PolyError, Polynomial};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("fields live on different domains")]
    DomainMismatch,
    #[error("invalid homotopy: {0}")]
    Homotopy(String),
    #[error("singular matrix at sample {0}")]
    SingularSample(usize),
    #[error("time sampling too coarse at sample {sample}, frame {frame} (gap {gap:.3})")]
    TimeSamplingTooCoarse { sample: usize, frame: usize, gap: f64 },
    #[error("cutoff needs the inner region inside the outer region")]
    ZeroMargin,
    #[error("no samples with |f| < {band}")]
    EmptyBand { band: f64 },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
