//! Higher-order Bell correlations of entangled hyperon-antihyperon pairs.
//!
//! The crate builds two-qubit spin states of hyperon pairs, the unsharp
//! spin measurements realized by weak decays, and the generalized
//! Clauser-Horne (CH) operator. On top of that it evaluates moments,
//! cumulants and central moments of the operator, the local-realist
//! bounds they must obey (with and without the timelike-separation
//! correction), and a decay-event Monte Carlo that recovers all of it
//! from simulated angular distributions.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
// `!(x <= 1.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bell;
pub mod bounds;
pub mod channels;
pub mod error;
pub mod linalg;
pub mod moments;
pub mod montecarlo;
pub mod povm;
pub mod scan;
pub mod states;

pub use error::{Error, Result};
