//! Sparse-recovery thresholds for lp-minimization under Gaussian measurement
//! matrices, null-space condition certification, and the l0 / l1 / lp recovery
//! programs.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod cli;
pub mod conditions;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod instances;
pub mod io;
pub mod limits;
pub mod linalg;
pub mod optimize;
pub mod quadrature;
mod simplex;
pub mod solvers;

pub use error::{Error, Result};
pub use quadrature::QuadratureConfig;
