//! Verification toolkit for the fundamental polyhedra of the thirteen
//! Deligne–Mostow lattices with 2-fold symmetry.

pub mod arithmetic;
pub mod catalog;
pub mod check;
pub mod cli;
pub mod domain;
pub mod error;
pub mod moves;
pub mod polyhedron;
pub mod tolerances;
pub mod verification;

pub use error::{Error, Result};
