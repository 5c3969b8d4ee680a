//! The global chain produced by parallel composition.

use alloc::vec::Vec;

use crate::model::{Action, LocalState, ModelKind};
use crate::sparse::RateMatrix;

/// System-level health of a global state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Health {
    Up,
    Down,
}

/// Atomic propositions over global states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateLabel {
    /// No partition has failed.
    Up,
    /// Some partition has failed.
    Down,
    /// Every partition is fully operational.
    Operational,
    /// Up, but not every partition is operational.
    Degraded,
    /// Same states as `Down`.
    Failed,
}

impl StateLabel {
    pub const ALL: [StateLabel; 5] = [
        StateLabel::Up,
        StateLabel::Down,
        StateLabel::Operational,
        StateLabel::Degraded,
        StateLabel::Failed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateLabel::Up => "up",
            StateLabel::Down => "down",
            StateLabel::Operational => "operational",
            StateLabel::Degraded => "degraded",
            StateLabel::Failed => "failed",
        }
    }

    /// Accepts the label names plus `oper` as a short form of `operational`.
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "oper" => Some(StateLabel::Operational),
            _ => Self::ALL.into_iter().find(|l| l.name() == s),
        }
    }

    pub fn holds(self, locals: &[LocalState]) -> bool {
        let up = locals.iter().all(|l| l.is_up());
        let all_oper = locals.iter().all(|&l| l == LocalState::Operational);
        match self {
            StateLabel::Up => up,
            StateLabel::Down | StateLabel::Failed => !up,
            StateLabel::Operational => all_oper,
            StateLabel::Degraded => up && !all_oper,
        }
    }
}

/// One composed transition with the action that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub action: Action,
    pub rate: f64,
}

/// Up/down labeling rule: up iff every partition is operational or degraded.
pub fn label_state(locals: &[LocalState]) -> Health {
    if locals.iter().all(|l| l.is_up()) {
        Health::Up
    } else {
        Health::Down
    }
}

/// Base-3 digit decoding of a global state index. Partition 0 is the most
/// significant digit and digit `d` means local state `d + 1`, so indices are
/// lexicographic over the partition tuples.
pub fn decode_state(partitions: usize, mut index: usize) -> Vec<LocalState> {
    let mut out = alloc::vec![LocalState::Failed; partitions];
    for slot in out.iter_mut().rev() {
        *slot = LocalState::from_index(index % 3);
        index /= 3;
    }
    out
}

pub fn encode_state(locals: &[LocalState]) -> usize {
    locals.iter().fold(0, |acc, l| acc * 3 + l.index())
}

/// Labeled global CTMC over `3^N` states.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedCtmc {
    kind: ModelKind,
    partitions: usize,
    rates: RateMatrix,
    transitions: Vec<Transition>,
    labels: Vec<Health>,
}

impl ComposedCtmc {
    /// Aggregates `transitions` into the rate matrix and labels every state.
    pub fn new(kind: ModelKind, partitions: usize, transitions: Vec<Transition>) -> Self {
        let n = 3usize.pow(partitions as u32);
        let rates = RateMatrix::from_triplets(n, transitions.iter().map(|t| (t.from, t.to, t.rate)));
        Self {
            kind,
            partitions,
            rates,
            transitions,
            labels: label_states(partitions),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn partitions(&self) -> usize {
        self.partitions
    }

    pub fn len(&self) -> usize {
        self.rates.n()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.n() == 0
    }

    pub fn rates(&self) -> &RateMatrix {
        &self.rates
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Distinct ordered state pairs with a positive rate, self-loops included.
    pub fn transition_count(&self) -> usize {
        self.rates.nnz()
    }

    pub fn labels(&self) -> &[Health] {
        &self.labels
    }

    pub fn state(&self, index: usize) -> Vec<LocalState> {
        decode_state(self.partitions, index)
    }

    pub fn index_of(&self, locals: &[LocalState]) -> usize {
        assert_eq!(locals.len(), self.partitions);
        encode_state(locals)
    }

    /// The global-operational state, which is also the initial state.
    pub fn operational_state(&self) -> usize {
        self.len() - 1
    }

    pub fn initial_state(&self) -> usize {
        self.operational_state()
    }

    pub fn initial_distribution(&self) -> Vec<f64> {
        let mut v = alloc::vec![0.0; self.len()];
        v[self.initial_state()] = 1.0;
        v
    }

    pub fn up_mask(&self) -> Vec<bool> {
        self.labels.iter().map(|&h| h == Health::Up).collect()
    }

    pub fn label_mask(&self, label: StateLabel) -> Vec<bool> {
        (0..self.len())
            .map(|i| label.holds(&self.state(i)))
            .collect()
    }

    /// Same chain with every transition whose action matches `drop` removed.
    pub fn without_actions(&self, drop: impl Fn(Action) -> bool) -> Self {
        let kept = self
            .transitions
            .iter()
            .filter(|t| !drop(t.action))
            .copied()
            .collect();
        Self::new(self.kind, self.partitions, kept)
    }
}

/// Labels for every global state of an `N`-partition chain, by index.
pub fn label_states(partitions: usize) -> Vec<Health> {
    let n = 3usize.pow(partitions as u32);
    (0..n)
        .map(|i| label_state(&decode_state(partitions, i)))
        .collect()
}
