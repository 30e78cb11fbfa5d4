//! Simulation and cross-verification toolkit for a damped single-mode
//! optical cavity treated as an open quantum system.
//!
//! The same dynamics is computed several independent ways, each serving as
//! an oracle for the others:
//!
//! - [`lindblad`]: the master equation in truncated Fock space (RK4),
//! - [`ou`]: the Ornstein–Uhlenbeck process followed by the P-function
//!   amplitude, sampled by Monte Carlo and solved through its moments,
//! - [`heisenberg`]: first and second moments of the Heisenberg-picture
//!   field and quadratures,
//! - [`dilation`]: the unitary dilation of the contraction semigroup on a
//!   discretized L² space,
//! - [`weyl`]: Weyl operators and the quasi-free transition semigroup.
//!
//! [`composite`] holds the finite system ⊗ bath machinery showing that
//! reduced Heisenberg dynamics turns projectors into POVM effects.

pub mod composite;
pub mod dilation;
pub mod error;
pub mod fock;
pub mod heisenberg;
pub mod lindblad;
pub mod ou;
pub mod weyl;

pub use composite::{CompositeDims, DensityOperator};
pub use error::{Error, Result};
pub use fock::{CavityParams, ComplexMatrix, FockDim, StateVector};
pub use lindblad::{IntegratorConfig, LindbladModel};
pub use ou::{Method, RngSeed};

pub use num_complex::Complex64;
