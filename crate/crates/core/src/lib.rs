//! Exact computations for the n-gonal construction on permutation monodromy:
//! covers of a base curve, the lift cover and its correspondences, integral
//! homology with Prym lattices, and the numeric bounds used to build
//! counterexamples.

pub mod bounds;
pub mod corresp;
pub mod cover;
pub mod homology;
pub mod ngonal;
pub mod perm;
pub mod search;
pub mod seed;
