//! Noise propagation for fermionic observables measured through
//! fermion-to-qubit encodings.

pub mod bounds;
pub mod circuits;
pub mod encodings;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub mod linalg;
pub mod noise;
pub mod oracle;
pub mod special;
pub mod synthetic;

pub use error::{Error, Result};
