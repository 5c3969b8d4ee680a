use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{Action, Violation};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A component kind is used but has no library entry.
    MissingKind(String),
    /// Requested partition count is outside `1..=node_count`.
    PartitionCount { requested: usize, nodes: usize },
    /// Input model failed validation.
    Invalid(Vec<Violation>),
    /// Cross-partition DCU actions were requested for an SCU-only module.
    CrossDcuOnScuModel,
    /// An action declared as synchronized is missing from one participant,
    /// or an action is shared between modules without being declared.
    Unsynchronized(Action),
    /// The module list is empty.
    NoModules,
    /// Too many partitions for an explicitly enumerated state space.
    StateSpaceTooLarge { partitions: usize },
    NonFiniteRate,
    InvalidTolerance(f64),
    InvalidTime(f64),
    /// The initial vector is not a probability distribution over the states.
    NotADistribution,
    NoUpStates,
    /// Steady-state solve did not reach the residual tolerance.
    Singular { residual: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MissingKind(k) => write!(f, "component kind `{k}` is not in the library"),
            Error::PartitionCount { requested, nodes } => write!(
                f,
                "cannot split {nodes} nodes into {requested} partitions"
            ),
            Error::Invalid(vs) => {
                write!(f, "invalid model")?;
                for v in vs {
                    write!(f, "; {v}")?;
                }
                Ok(())
            }
            Error::CrossDcuOnScuModel => {
                write!(f, "cross-partition DCU actions require the combined model")
            }
            Error::Unsynchronized(a) => write!(f, "action `{a}` has no synchronization partner"),
            Error::NoModules => write!(f, "no partition modules to compose"),
            Error::StateSpaceTooLarge { partitions } => {
                write!(f, "{partitions} partitions exceed the supported state space")
            }
            Error::NonFiniteRate => write!(f, "rate matrix contains a non-finite or negative rate"),
            Error::InvalidTolerance(e) => write!(f, "tolerance must be positive, got {e}"),
            Error::InvalidTime(t) => write!(f, "invalid time horizon {t}"),
            Error::NotADistribution => write!(f, "initial vector is not a probability distribution"),
            Error::NoUpStates => write!(f, "model has no up states"),
            Error::Singular { residual } => {
                write!(f, "steady-state system is singular (residual {residual:e})")
            }
        }
    }
}

impl core::error::Error for Error {}
