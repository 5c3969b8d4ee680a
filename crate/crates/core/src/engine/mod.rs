//! Numerical analysis of composed chains.

mod metrics;
mod poisson;
mod steady;
mod transient;

pub use metrics::{
    availability, check_scrub_recoverability, eventually, forall_next, globally, occupation,
    reachable, reliability, steady_state_mass, strict_reliability,
};
pub use poisson::PoissonWeights;
pub use steady::{steady_state, DIRECT_LIMIT};
pub use transient::{transient, transient_with_occupation, TransientResult, DEFAULT_EPSILON};
