//! Exact diagonalization of the one-dimensional open-boundary Fermi-Hubbard
//! chain and entanglement analysis of site pairs treated as ququarts.
//!
//! The crate is organized bottom-up:
//!
//! * [`fock`] — bit-packed Fock states, particle-number sectors, elementary
//!   fermionic moves with anticommutation signs.
//! * [`hamiltonian`] — sector-restricted sparse Hubbard Hamiltonian and
//!   matrix-vector products.
//! * [`eigen`] — dense and Lanczos ground-state solvers with degeneracy
//!   detection.
//! * [`rdm`] — exact one-site and two-site fermionic reduced density
//!   matrices.
//! * [`entanglement`] — von Neumann entropy, lower bound of concurrence for
//!   ququart pairs, Wootters concurrence, spectral tracking of the dominant
//!   half-filled pair state, four-tangle, and related functionals.
//! * [`oracle`] — slow full-Fock-space reference implementations used only
//!   by tests to validate sign conventions.
//! * [`sweep`] — per-point measurement pipeline behind the CLI driver.
//!
//! With the default `parallel` feature the inner loops (matrix-vector
//! products, Lanczos reductions, sweep points) run on rayon; disabling the
//! feature yields a fully sequential build producing identical numbers.

pub mod eigen;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod oracle;
pub mod rdm;
pub mod rng;
pub mod sweep;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
