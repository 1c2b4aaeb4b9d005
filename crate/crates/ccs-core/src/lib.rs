//! Coherent configurations (schemes): axiom verification, intersection
//! numbers, constructions, adjacency-algebra idempotents, classification of
//! balanced/reduced schemes, and an arithmetic feasibility filter for
//! `(m,n,r)` degree profiles.
//!
//! A scheme is given here by an `n x n` color matrix over `0..k-1`; colors are
//! the basis relations. [`scheme::verify_scheme`] checks the axioms and
//! produces a [`scheme::Scheme`] carrying fibers, degrees and the full tensor
//! of intersection numbers `c_RS^T`.

pub mod algebra;
pub mod analysis;
pub mod constructors;
pub mod feasibility;
pub mod io;
pub mod scheme;

pub use scheme::{IntersectionTensor, RelationHandle, Scheme, VerifyError};
