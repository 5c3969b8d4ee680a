//! File formats, PRISM export, property queries and design-space sweeps on
//! top of [`tmrdep_core`].
// Negated comparisons reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dfg_file;
mod error;
pub mod library;
pub mod prism;
pub mod property;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use tmrdep_core as core;
