pub mod scalar;
pub mod group;
pub mod complex;
pub mod polytope;
pub mod homology;
pub mod recognition;
pub mod invariants;
pub mod catalog;
pub mod quotient;
pub mod pipeline;
