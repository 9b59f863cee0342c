//! Representations of quivers with relations over F_p, as a concrete
//! abelian category.

mod morphism;
mod rep;
mod subobject;

pub use morphism::{direct_sum, hom_space, is_isomorphic, DirectSum, ImageFactorization, Isomorphism, RepMor};
pub use rep::{Arrow, Quiver, Rep, RelationTerm};
pub use subobject::{composition_series, enumerate_subobjects, jh_poset, JhPoset, SubobjectCF};

#[cfg(test)]
pub(crate) use rep::fixtures as rep_fixtures;

use thiserror::Error;

use crate::exactla::LinalgError;

/// Search bound for exhaustive isomorphism testing.
pub const ISO_SEARCH_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("InvalidQuiver: {0}")]
    InvalidQuiver(String),
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("RelationViolated: relation {0}")]
    RelationViolated(usize),
    #[error("NotIntertwining: arrow {0}")]
    NotIntertwining(String),
    #[error("QuiverMismatch")]
    QuiverMismatch,
    #[error("FieldMismatch")]
    FieldMismatch,
    #[error("CompositionMismatch")]
    CompositionMismatch,
    #[error("AmbientMismatch")]
    AmbientMismatch,
    #[error("NotClosed: subspace not preserved by arrow {0}")]
    NotClosed(String),
    #[error("NotMultiplicityFree")]
    NotMultiplicityFree,
    #[error("NotNilpotent")]
    NotNilpotent,
    #[error("IncompatibleOrder: {0}")]
    IncompatibleOrder(String),
    #[error("NotSplit")]
    NotSplit,
    #[error("NotInjective")]
    NotInjective,
    #[error("NotSurjective")]
    NotSurjective,
    #[error("NotInvertible")]
    NotInvertible,
    #[error("NoFactorization")]
    NoFactorization,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
