//! Symbols, moment bounds and Monte Carlo verification for one-dimensional Lévy-type processes.

// `!(a > b)` guards are written that way so NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimate;
pub mod presets;
pub mod quad;
pub mod simulate;
pub mod special;
pub mod stats;
pub mod symbol;
pub mod triplet;

pub use error::{Error, Result};
