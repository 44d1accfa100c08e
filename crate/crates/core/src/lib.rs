//! Quantum stochastic thermodynamics for finite-dimensional systems: trajectory ensembles,
//! heat statistics, entropy production and a five-step work extraction protocol.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod error;
pub mod figures;
pub mod numerics;
pub mod oracles;
pub mod output;
pub mod protocol;
pub mod random;
pub mod states;
pub mod trajectories;
pub mod validation;

pub use error::{Error, Result};
