//! Shared domain types and their invariants.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

/// One operation of the data-flow graph, implemented as one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfgNode {
    pub id: String,
    pub kind: String,
}

impl DfgNode {
    pub fn new(id: impl Into<String>, kind: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: kind.into(),
        }
    }
}

/// Data-flow graph: operation nodes plus producer/consumer edges.
///
/// Construction does not check invariants; call [`Dfg::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dfg {
    nodes: Vec<DfgNode>,
    edges: Vec<(String, String)>,
}

impl Dfg {
    pub fn new(nodes: Vec<DfgNode>, edges: Vec<(String, String)>) -> Self {
        Self { nodes, edges }
    }

    pub fn nodes(&self) -> &[DfgNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&DfgNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    fn index_map(&self) -> BTreeMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect()
    }

    /// Stable topological order (node indices): among ready nodes the one
    /// listed first in the graph wins, so an already-topological listing is
    /// returned unchanged. `None` if the graph has a cycle or a dangling edge.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let index = self.index_map();
        let n = self.nodes.len();
        let mut succ = alloc::vec![Vec::new(); n];
        let mut indegree = alloc::vec![0usize; n];
        for (from, to) in &self.edges {
            let (&a, &b) = (index.get(from.as_str())?, index.get(to.as_str())?);
            succ[a].push(b);
            indegree[b] += 1;
        }
        let mut ready: BinaryHeap<Reverse<usize>> = (0..n)
            .filter(|&i| indegree[i] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(i)) = ready.pop() {
            order.push(i);
            for &j in &succ[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(Reverse(j));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for node in &self.nodes {
            if !seen.insert(node.id.as_str()) {
                out.push(Violation::new(Invariant::DuplicateNodeId, &node.id));
            }
        }
        let mut dangling = false;
        for (from, to) in &self.edges {
            for end in [from, to] {
                if !seen.contains(end.as_str()) {
                    dangling = true;
                    out.push(Violation::new(Invariant::DanglingEdge, end));
                }
            }
        }
        if !dangling && out.is_empty() && self.topological_order().is_none() {
            let cyclic = self
                .edges
                .iter()
                .find(|(a, b)| a == b)
                .map(|(a, _)| a.clone())
                .unwrap_or_else(|| String::from("graph"));
            out.push(Violation::new(Invariant::Cycle, cyclic));
        }
        out
    }
}

/// Characterization library: critical configuration bits per component kind.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentLibrary {
    entries: BTreeMap<String, u64>,
}

impl ComponentLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, kind: impl Into<String>, critical_bits: u64) {
        self.entries.insert(kind.into(), critical_bits);
    }

    pub fn critical_bits(&self, kind: &str) -> Option<u64> {
        self.entries.get(kind).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Kinds used by `dfg` that have no entry.
    pub fn validate_for(&self, dfg: &Dfg) -> Vec<Violation> {
        let mut missing = BTreeSet::new();
        for node in dfg.nodes() {
            if !self.entries.contains_key(&node.kind) {
                missing.insert(node.kind.as_str());
            }
        }
        missing
            .into_iter()
            .map(|k| Violation::new(Invariant::UnknownKind, k))
            .collect()
    }
}

impl FromIterator<(String, u64)> for ComponentLibrary {
    fn from_iter<I: IntoIterator<Item = (String, u64)>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Assignment of DFG nodes to TMR partitions, in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    pub cuts: Vec<Vec<String>>,
    /// Adds one more partition holding only the three output voters.
    pub include_terminal_voter_partition: bool,
}

impl PartitionPlan {
    pub fn new(cuts: Vec<Vec<String>>, include_terminal_voter_partition: bool) -> Self {
        Self {
            cuts,
            include_terminal_voter_partition,
        }
    }

    /// Number of CTMC partitions, counting the terminal voter partition.
    pub fn partition_count(&self) -> usize {
        self.cuts.len() + usize::from(self.include_terminal_voter_partition)
    }

    pub fn validate(&self, dfg: &Dfg) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.cuts.is_empty() {
            out.push(Violation::new(Invariant::NoPartitions, "plan"));
            return out;
        }
        let index = dfg.index_map();
        let mut group_of: BTreeMap<&str, usize> = BTreeMap::new();
        for (g, group) in self.cuts.iter().enumerate() {
            if group.is_empty() {
                out.push(Violation::new(Invariant::EmptyGroup, format!("group {}", g + 1)));
            }
            for id in group {
                if !index.contains_key(id.as_str()) {
                    out.push(Violation::new(Invariant::UnknownNode, id));
                } else if group_of.insert(id.as_str(), g).is_some() {
                    out.push(Violation::new(Invariant::Overlap, id));
                }
            }
        }
        for node in dfg.nodes() {
            if !group_of.contains_key(node.id.as_str()) {
                out.push(Violation::new(Invariant::Coverage, &node.id));
            }
        }
        for (from, to) in dfg.edges() {
            if let (Some(&a), Some(&b)) = (group_of.get(from.as_str()), group_of.get(to.as_str())) {
                if a > b {
                    out.push(Violation::new(
                        Invariant::BackwardEdge,
                        format!("{from} -> {to}"),
                    ));
                }
            }
        }
        out
    }
}

/// Stochastic parameters. All rates are per second, times in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct RateParams {
    /// Upsets per bit per second.
    pub lambda_bit: f64,
    /// Scrub rate, `1 / tau`.
    pub mu: f64,
    /// `false` disables scrubbing entirely (then `mu` is ignored).
    pub scrubbing: bool,
    pub alpha_scu: f64,
    pub alpha_dcu: f64,
    pub lambda_voter: f64,
    /// Same-partition DCU rate per ordered domain pair; `beta = 2 * gamma`.
    pub gamma_same: Option<f64>,
    /// Cross-partition DCU rate per ordered domain pair; `beta1 = 3 * gamma1`.
    pub gamma_cross: Option<f64>,
    pub mission_time: f64,
}

impl Default for RateParams {
    fn default() -> Self {
        Self {
            lambda_bit: 7.31e-12,
            mu: 1.0 / 900.0,
            scrubbing: true,
            alpha_scu: 0.99,
            alpha_dcu: 0.01,
            lambda_voter: 0.0,
            gamma_same: None,
            gamma_cross: None,
            mission_time: 730.0 * crate::HOUR,
        }
    }
}

impl RateParams {
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut rate = |name: &str, v: f64| {
            if !(v.is_finite() && v >= 0.0) {
                out.push(Violation::new(Invariant::NegativeRate, name));
            }
        };
        rate("lambda_bit", self.lambda_bit);
        rate("mu", self.mu);
        rate("alpha_scu", self.alpha_scu);
        rate("alpha_dcu", self.alpha_dcu);
        rate("lambda_voter", self.lambda_voter);
        if let Some(g) = self.gamma_same {
            rate("gamma_same", g);
        }
        if let Some(g) = self.gamma_cross {
            rate("gamma_cross", g);
        }
        rate("mission_time", self.mission_time);
        if libm::fabs(self.alpha_scu + self.alpha_dcu - 1.0) > 1e-9 {
            out.push(Violation::new(
                Invariant::AlphaSum,
                format!("alpha_scu + alpha_dcu = {}", self.alpha_scu + self.alpha_dcu),
            ));
        }
        if self.scrubbing && !(self.mu > 0.0) {
            out.push(Violation::new(Invariant::ScrubRate, "mu"));
        }
        out
    }
}

/// Which per-partition CTMC is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    ScuOnly,
    Combined,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::ScuOnly => "scu",
            ModelKind::Combined => "combined",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rates that parameterize one partition's CTMC (per second).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionRates {
    /// Raw domain failure rate, module sum plus voter.
    pub lambda_domain: f64,
    /// SCU share of the domain rate; drives `scu1`/`scu2`.
    pub lambda_scu: f64,
    /// Same-partition DCU rate per domain pair.
    pub beta: f64,
    /// Cross-partition DCU rate.
    pub beta1: f64,
    pub voter_included: bool,
}

impl PartitionRates {
    /// Pure SCU rates with no DCU hazard.
    pub fn scu(lambda: f64) -> Self {
        Self {
            lambda_domain: lambda,
            lambda_scu: lambda,
            beta: 0.0,
            beta1: 0.0,
            voter_included: false,
        }
    }
}

/// Local state of one partition: number of healthy domains, floored at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalState {
    Failed = 1,
    Degraded = 2,
    Operational = 3,
}

impl LocalState {
    pub const ALL: [LocalState; 3] = [LocalState::Failed, LocalState::Degraded, LocalState::Operational];

    /// 0-based position used for state indexing (`Failed` = 0).
    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn value(self) -> u8 {
        self as u8
    }

    pub fn is_up(self) -> bool {
        self != LocalState::Failed
    }

    /// One more failed domain.
    pub fn down_one(self) -> Option<Self> {
        match self {
            LocalState::Operational => Some(LocalState::Degraded),
            LocalState::Degraded => Some(LocalState::Failed),
            LocalState::Failed => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LocalState::Failed => "failed",
            LocalState::Degraded => "degraded",
            LocalState::Operational => "operational",
        }
    }
}

/// Transition label. Partition-local labels carry their owning partition so
/// they never synchronize across modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Scu1(usize),
    Scu2(usize),
    Dcu1(usize),
    Dcu2(usize),
    /// Global blind scrub, shared by every partition.
    PerformScrub,
    /// DCU that starts in partition `origin` and also hits `target`.
    CrossDcu { origin: usize, target: usize },
}

impl Action {
    pub fn is_scrub(self) -> bool {
        matches!(self, Action::PerformScrub)
    }
}

/// PRISM-style action name with 1-based partition numbers.
impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Action::Scu1(p) => write!(f, "p{}_scu1", p + 1),
            Action::Scu2(p) => write!(f, "p{}_scu2", p + 1),
            Action::Dcu1(p) => write!(f, "p{}_dcu1", p + 1),
            Action::Dcu2(p) => write!(f, "p{}_dcu2", p + 1),
            Action::PerformScrub => f.write_str("perform_scrub"),
            Action::CrossDcu { origin, target } => write!(f, "dcu_{}_{}", origin + 1, target + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTransition {
    pub from: LocalState,
    pub to: LocalState,
    pub action: Action,
    pub rate: f64,
}

/// One partition's labeled three-state CTMC.
#[derive(Debug, Clone, PartialEq)]
pub struct CtmcModule {
    /// 0-based partition index.
    pub partition: usize,
    pub kind: ModelKind,
    pub alphabet: BTreeSet<Action>,
    pub transitions: Vec<LocalTransition>,
}

impl CtmcModule {
    pub fn new(partition: usize, kind: ModelKind) -> Self {
        Self {
            partition,
            kind,
            alphabet: BTreeSet::new(),
            transitions: Vec::new(),
        }
    }

    pub const INITIAL: LocalState = LocalState::Operational;

    /// Adds a transition; the action joins the alphabet even when the rate
    /// is zero, but zero-rate transitions are not stored.
    pub fn push(&mut self, from: LocalState, to: LocalState, action: Action, rate: f64) {
        self.alphabet.insert(action);
        if rate != 0.0 {
            self.transitions.push(LocalTransition {
                from,
                to,
                action,
                rate,
            });
        }
    }

    /// Summed rate for an ordered local state pair.
    pub fn rate(&self, from: LocalState, to: LocalState) -> f64 {
        self.transitions
            .iter()
            .filter(|t| t.from == from && t.to == to)
            .map(|t| t.rate)
            .sum()
    }

    pub fn transitions_from(&self, from: LocalState) -> impl Iterator<Item = &LocalTransition> {
        self.transitions.iter().filter(move |t| t.from == from)
    }
}

/// Which invariant a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    DuplicateNodeId,
    DanglingEdge,
    Cycle,
    UnknownKind,
    NoPartitions,
    EmptyGroup,
    UnknownNode,
    Overlap,
    Coverage,
    BackwardEdge,
    NegativeRate,
    AlphaSum,
    ScrubRate,
}

impl Invariant {
    pub fn describe(self) -> &'static str {
        match self {
            Invariant::DuplicateNodeId => "node ids must be unique",
            Invariant::DanglingEdge => "edge endpoint references a missing node",
            Invariant::Cycle => "graph must be acyclic",
            Invariant::UnknownKind => "component kind missing from library",
            Invariant::NoPartitions => "at least one partition required",
            Invariant::EmptyGroup => "partition group is empty",
            Invariant::UnknownNode => "partition references a missing node",
            Invariant::Overlap => "node assigned to more than one partition",
            Invariant::Coverage => "node not assigned to any partition",
            Invariant::BackwardEdge => "edge flows from a later partition to an earlier one",
            Invariant::NegativeRate => "rate must be finite and nonnegative",
            Invariant::AlphaSum => "alpha_scu + alpha_dcu must equal 1",
            Invariant::ScrubRate => "scrub rate must be positive when scrubbing is enabled",
        }
    }
}

/// A broken invariant and the element that breaks it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: Invariant,
    pub subject: String,
}

impl Violation {
    pub fn new(invariant: Invariant, subject: impl ToString) -> Self {
        Self {
            invariant,
            subject: subject.to_string(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant.describe(), self.subject)
    }
}
