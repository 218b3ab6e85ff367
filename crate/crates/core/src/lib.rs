//! Factorization of special automorphisms of rank-2 bundles over sampled
//! domains into unipotent replicas, plus exact checks of the underlying
//! matrix-product identities.

pub mod bundle;
pub mod elimination;
pub mod fields;
pub mod identities;
pub mod linalg;
pub mod pipeline;
pub mod scalar;
pub mod splitting;
