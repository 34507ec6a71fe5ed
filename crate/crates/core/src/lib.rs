//! Conserved-observable initial states for qubit–boson models.
//!
//! The crate builds truncated Fock-space operators, rotates a qubit–environment
//! Hamiltonian into the eigenframe of a chosen qubit observable, solves the
//! operator Riccati equation that block-diagonalizes it, and constructs the
//! initial states whose reduced qubit dynamics keep the observable constant.
//! Both a brute-force propagator and the factorized branch propagator are
//! provided so every construction can be checked numerically.
//!
//! Everything is dense and `no_std` (with `alloc`); IO lives in the `cqs` crate.

#![no_std]
// NaN must fail every tolerance gate, so gates are written as `!(x <= tol)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod blockform;
pub mod dynamics;
mod error;
pub(crate) mod linalg;
pub mod operators;
pub mod riccati;
pub mod states;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix; operators on the qubit ⊗ environment space are
/// stored with the qubit index as the slow (outer) index.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

pub use blockform::{BlockHamiltonian, JcParams, ObservableDiag, RabiParams};
pub use dynamics::{TimeGrid, TimeSeries};
pub use operators::FockSpace;
pub use riccati::{BiorthoSystem, RiccatiSolution};
pub use states::DephasingState;
