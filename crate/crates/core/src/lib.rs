//! Fock-state quantum codes built from l1 codes on the discrete simplex,
//! with Knill-Laflamme certification against photon loss and a dense
//! small-instance simulator.

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod bounds;
pub mod certify;
pub mod classical;
pub mod cli;
pub mod error;
pub mod fock;
pub mod oracle;
pub mod rng;
pub mod simplex;

pub use error::{Error, Result};
pub use simplex::{LossPattern, SimplexPoint, SimplexShape};
