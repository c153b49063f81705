//! Quench dynamics of the transverse-field Ising chain in its momentum-space
//! (free-fermion) representation.
//!
//! Each quasi-momentum mode `k` is an independent two-level system with
//! Bloch Hamiltonian `d(k)·σ`. The crate provides
//!
//! - [`su2`]: closed-form single-mode linear algebra (evolution, rotations, observables),
//! - [`tfim`]: the quench model, Loschmidt amplitudes, rate functions, Fisher-zero
//!   analytics and the pulse-schedule mapping,
//! - [`otoc`]: the time-reversal echo, multiple-quantum spectra and the
//!   double-well detector,
//! - [`ed`]: a brute-force `2^N` exact simulation of the spin chain used as
//!   ground truth for the momentum factorization.

// `!(x <= tol)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ed;
pub mod error;
pub mod otoc;
pub mod su2;
pub mod tfim;

pub use error::{Error, Result};
pub use su2::{BlochVector, QubitState, Unitary2};
