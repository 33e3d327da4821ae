//! Faithful input states for quantum channel tomography.
//!
//! A bipartite probe `R` is faithful when `(ℰ ⊗ 𝕀)(R)` determines the channel
//! `ℰ`. This crate tests faithfulness through the operator `Ř`, reconstructs
//! Choi operators from probe outputs, patches together sets of individually
//! unfaithful probes, and simulates how measurement noise is amplified.

pub mod error;
pub mod faithfulness;
pub mod io;
pub mod linalg;
pub mod objects;
pub mod reconstruction;
pub mod sim;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use objects::{BipartiteState, Channel, ChoiOperator};
