//! Synthesis and verification of perfect-state-transfer chains.
//!
//! Given a prescribed spectrum, this crate reconstructs the unique
//! mirror-symmetric tridiagonal Hamiltonian realizing it (in exact rational
//! arithmetic), verifies end-to-end transfer by unitary evolution, and
//! produces machine-checkable certificates for two arithmetic obstructions:
//! Laplacian chains on three or more vertices never transfer, and several
//! spectral classes force at least one irrational coupling weight.
//!
//! Modules:
//! - [`spectra`]: eigenvalue lists, gap conditions, parity normalization
//! - [`orthopoly`]: exact/float polynomial recurrence and reconstruction steps
//! - [`hamiltonian`]: chain matrices, persymmetric block splits, symmetric trees
//! - [`synthesis`]: inverse eigenvalue reconstruction and certificates
//! - [`dynamics`]: tridiagonal eigensolver, evolution, fidelity checks

pub mod dynamics;
pub mod exact;
pub mod hamiltonian;
pub mod orthopoly;
pub mod rng;
pub mod spectra;
pub mod synthesis;

pub use dynamics::{EigenSystem, FidelityResult};
pub use hamiltonian::{HamiltonianKind, PathHamiltonian, SymmetricTree};
pub use spectra::{Spectrum, SpectrumKind, Time};
pub use synthesis::{Certificate, SynthesisReport};
