//! Exact dynamics of quantum teleportation when the two qubits on the
//! sending side share a common spin bath.
//!
//! The bath couples to both of Alice's qubits through an isotropic Heisenberg
//! interaction (the central-spin model). Because the coupling only sees the
//! total bath spin, an `N`-spin bath splits into independent total-spin
//! sectors and the reduced two-qubit dynamics is assembled sector by sector:
//!
//! * [`spin`] builds angular-momentum operators and the sector weights of
//!   unpolarized and polarized baths.
//! * [`state`] holds the Bloch/correlation representation of one- and
//!   two-qubit states, the Bell basis and its partially entangled deformation.
//! * [`evolution`] turns a bath and a pair of couplings into a time-dependent
//!   two-qubit channel in Pauli transfer form.
//! * [`protocol`] runs measurement, Bob's correction and the fidelity
//!   figures of merit on top of that channel.
//! * [`analytics`] carries the short-time closed forms and the quadratic-decay
//!   fit; [`oracle`] is an independent full Hilbert space evolution used to
//!   check the sector engine.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytics;
mod error;
pub mod evolution;
pub mod linalg;
pub mod oracle;
pub mod protocol;
pub mod spin;
pub mod state;

pub use error::{Error, Result};
