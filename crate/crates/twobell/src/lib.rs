//! Statevector verification that an eight-qubit state carrying four
//! unknown coefficients teleports over two Bell pairs.
//!
//! The encoded input lives on eight qubits but spans only four basis
//! terms, so a local circuit concentrates it onto two qubits. Those two
//! qubits teleport over a Φ+⊗Φ+ channel via the 16-branch Bell-basis
//! decomposition, and the receiver rebuilds the eight-qubit state from
//! six fresh ancillas. The crate simulates the full pipeline, checks the
//! underlying algebraic identities by brute force, and audits the
//! entanglement cost against the six-qubit-cluster alternative.
//!
//! Modules:
//! - [`statevector`]: dense labeled-qubit simulation substrate.
//! - [`bell`]: Bell states, projective Bell measurement, corrections.
//! - [`protocol`]: encode → compress → teleport → reconstruct pipeline.
//! - [`verify`]: independent brute-force identity checkers.
//! - [`resources`]: channel-cost accounting and the minimality audit.

pub mod bell;
pub mod error;
pub mod protocol;
pub mod resources;
pub mod statevector;
pub mod verify;

pub use error::{Error, Result};
