//! Integral first homology of the covers, intersection forms and the Prym
//! lattices with the maps induced by correspondences.

pub mod complex;
pub mod lattice;
pub mod matrix;
pub mod prym;

use thiserror::Error;

use crate::corresp::CorrespError;
use crate::cover::CoverError;
use crate::perm::PermError;

pub use complex::{h1_with_form, H1Lattice, SurfaceComplex};
pub use matrix::IntMatrix;
pub use prym::{
    correspondence_matrix, involution_matrix, prym_lattice, pushforward_matrix, transfer_matrix,
    verify_isogeny_package, PrymLattice, PrymPackage, Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("cover has {0} components; select one before building the complex")]
    Disconnected(usize),
    #[error("inconsistent cell structure: {0}")]
    Inconsistent(String),
    #[error("homology rank {found} differs from twice the genus {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("intersection form has determinant {0}")]
    NotUnimodular(String),
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("point map is not an involution")]
    NotAnInvolution,
    #[error("involution does not preserve the intersection form")]
    NotSymplectic,
    #[error("generator counts differ between source and target")]
    GeneratorMismatch,
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Corresp(#[from] CorrespError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Builds the complex of a connected cover.
pub fn build_complex(action: &crate::cover::CoverAction) -> Result<SurfaceComplex, HomologyError> {
    SurfaceComplex::new(action)
}
