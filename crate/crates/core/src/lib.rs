//! Continuous-time Markov chain dependability models for partitioned triple
//! modular redundancy (TMR) with blind configuration scrubbing.
//!
//! The crate is `no_std` (it needs `alloc`) and has no I/O. It covers:
//!
//! * [`model`]: the shared domain types (data-flow graph, characterization
//!   library, partition plan, rate parameters, per-partition CTMC modules) and
//!   their validation.
//! * [`rates`] and [`partition`]: failure-rate arithmetic and the
//!   topological partition planner.
//! * [`builder`]: per-partition CTMCs, synchronized actions and parallel
//!   composition into a [`ComposedCtmc`].
//! * [`engine`]: uniformization-based transient analysis, reliability,
//!   availability, steady state and the scrub-recoverability check.
//! * [`simulator`]: a discrete-event Monte Carlo estimator over the same
//!   composed chain, used as an independent cross-check.
//!
//! File formats, PRISM export, sweeps and the command line live in the
//! companion `tmrdep` crate.
#![no_std]
// Negated comparisons reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod builder;
pub mod composed;
pub mod engine;
mod error;
pub mod model;
pub mod partition;
pub mod rates;
pub mod simulator;
pub mod sparse;

pub use builder::{build_model, SyncSpec};
pub use composed::{ComposedCtmc, Health};
pub use error::{Error, Result};
pub use model::{
    Action, ComponentLibrary, CtmcModule, Dfg, DfgNode, LocalState, ModelKind, PartitionPlan,
    PartitionRates, RateParams, Violation,
};
pub use sparse::RateMatrix;

/// Seconds per hour, for callers that carry per-hour rates.
pub const HOUR: f64 = 3600.0;
