//! Computable convex affine and projective geometry.
//!
//! The crate provides homogeneous-coordinate arithmetic, convex domain
//! representations with membership/ray/face queries, the Hilbert metric,
//! asymptotic (recession) cones with their foliation and flow, singular-limit
//! experiments for automorphism sequences, and an affine classification of
//! quasi-homogeneous convex domains of dimension at most 4.

pub mod affine;
pub mod catalog;
pub mod classify;
pub mod cone;
pub mod domain;
pub mod error;
pub mod foliation;
pub mod hilbert;
pub mod limits;
pub mod projective;
pub mod rat;
pub mod sample;
pub mod simplex;

pub use error::{GeometryError, Result};
