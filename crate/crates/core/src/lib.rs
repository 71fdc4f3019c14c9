//! Exact computer-algebra machinery for constructing and verifying
//! two-dimensional optimal systems of Lie subalgebras: adjoint transformation
//! matrices with exp-polynomial entries, determined equations for the refined
//! subalgebra condition, invariant PDE systems with semi-invariant discovery,
//! and a numeric equivalence solver with honest Unknown verdicts.

pub mod adjoint;
pub mod algebra;
pub mod equivalence;
pub mod error;
pub mod exppoly;
pub mod expr;
pub mod fd;
pub mod fixtures;
pub mod invariants;
pub mod linalg;
pub mod poly;
pub mod ratio;
pub mod solver;
pub mod subalgebra;

pub use error::{LieError, Result};
