//! New Keynesian economy with heterogeneous production firms, endogenous
//! entry and exit, and Rotemberg-sticky intermediate prices.
//!
//! The crate solves the stationary equilibrium, calibrates it to firm
//! dynamics moments, linearizes the full dynamic system around it and
//! computes impulse responses to a monetary policy shock, alongside a
//! representative-firm benchmark with a closed-form solution.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod equilibrium;
pub mod dynamics;
pub mod error;
pub mod firm;
pub mod output;
pub mod params;
pub mod rfmodel;
pub mod stochproc;
pub mod variants;

pub use error::{Error, Result};
