//! Entanglement-based witnessing of non-Markovian qubit dynamics.
//!
//! Dense complex linear algebra, qubit Pauli channels (including the
//! eternal non-Markovian model), Choi-matrix divisibility tests, the
//! negativity witness built on a tripartite state, and contractive-function
//! profile matching.

pub mod divisibility;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod profiles;
pub mod random;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, C64};
