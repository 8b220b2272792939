//! Γ-point plane-wave electronic structure with correlation-optimized
//! virtual orbitals (COVOs), downfolded FCI and a simulated two-qubit VQE.
//!
//! The pipeline is: [`lattice`] basis → [`pseudopot`] potentials →
//! [`integrals`] context → [`groundstate`] RHF orbitals → [`covo`] virtual
//! orbitals → [`integrals::SqHamiltonian`] → [`fci`] or [`vqe`].
//! [`pipeline`] strings these together for bond scans; the runnable
//! programs in `examples/` walk through each stage.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops over several same-length arrays read better in numeric code.
#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod covo;
pub mod error;
pub mod fci;
pub mod groundstate;
pub mod integrals;
pub mod lattice;
pub mod optimize;
pub mod orbital;
pub mod pipeline;
pub mod pseudopot;
pub mod units;
pub mod vqe;

pub use error::{Error, Result};
