//! Generating sets for multigraded section algebras of polyhedral divisors.

pub mod cone;
pub mod cox;
pub mod engine;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod pdivisor;
pub mod poly;
pub mod polyhedron;
pub mod subdivision;
pub mod torus;
pub mod variety;
pub mod verify;

pub use error::{Error, Result};
