//! Simulation of probe-beam structuring by dark states in a drive-patterned
//! three-level medium.
//!
//! A weak probe propagates through an atomic vapour whose transparency is set
//! point by point by a strong drive field. Where the drive is strong the atoms
//! sit in the dark state and the probe is transmitted; near drive nulls it is
//! absorbed. The transmitted probe therefore carries the drive pattern with
//! features narrower than the drive's own, and narrower than the probe's
//! diffraction limit.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod atomic;
pub mod cli;
pub mod config;
pub mod error;
pub mod fields;
pub mod propagation;
pub mod scenario;
pub mod selfcheck;
pub mod sweep;

pub use error::{Error, Result};
