//! Entanglement of two probe qubits coupled to an anisotropic Heisenberg XXZ chain.
//!
//! The chain is diagonalized exactly, eliminated at second order to give an
//! effective two-qubit Hamiltonian, and the probes' concurrence is followed in
//! time. [`experiments`] assembles these into field sweeps, period measurements
//! and critical-field scans.

pub mod dynamics;
pub mod effective;
pub mod error;
pub mod experiments;
pub mod operators;
pub mod spectra;

pub use error::{Error, Result};
pub use operators::{Boundary, ChainSpec, Convention, CouplingSpec, OperatorMatrix, Topology, C64};
