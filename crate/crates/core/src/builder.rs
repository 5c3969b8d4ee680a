//! Per-partition CTMC construction and parallel composition.
//!
//! Each partition is a three-state chain over the number of healthy domains
//! (3, 2, 1). Partition-local actions are tagged with their partition and
//! interleave. Two families of actions synchronize:
//!
//! * `perform_scrub` is shared by every partition. The scrub master carries
//!   the rate `mu`, every other partition carries rate 1, so the joint move
//!   back to the all-operational state has rate `mu`.
//! * `dcu_i_j` / `dcu_j_i` for each partition pair. `dcu_i_j` carries
//!   `k_i * beta1_i` on partition `i` (with `k_i` its healthy domains) and
//!   rate 1 on partition `j`; both partitions lose one domain. Neither action
//!   is enabled once either partner has failed.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::composed::{ComposedCtmc, Transition};
use crate::model::{Action, CtmcModule, LocalState, ModelKind, PartitionRates};
use crate::{Error, Result};

use LocalState::{Degraded, Failed, Operational};

/// Largest partition count whose `3^N` state space is enumerated.
pub const MAX_PARTITIONS: usize = 12;

/// Synchronization layout for a set of partition modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncSpec {
    pub partitions: usize,
    /// Partition whose scrub transitions carry `mu`.
    pub scrub_master: usize,
    /// Unordered partition pairs `(i, j)` with `i < j` that exchange DCUs.
    pub cross_dcu_pairs: Vec<(usize, usize)>,
}

impl SyncSpec {
    /// Scrub master is partition 0; the combined model pairs every two
    /// partitions.
    pub fn new(partitions: usize, kind: ModelKind) -> Self {
        let cross_dcu_pairs = match kind {
            ModelKind::ScuOnly => Vec::new(),
            ModelKind::Combined => (0..partitions)
                .flat_map(|i| (i + 1..partitions).map(move |j| (i, j)))
                .collect(),
        };
        Self {
            partitions,
            scrub_master: 0,
            cross_dcu_pairs,
        }
    }

    /// Rate a partition puts on its own `perform_scrub` transitions.
    pub fn scrub_rate(&self, partition: usize, mu: f64) -> f64 {
        if partition == self.scrub_master {
            mu
        } else {
            1.0
        }
    }

    /// Partition that carries the numeric rate of a synchronized action.
    pub fn rate_carrier(&self, action: Action) -> Option<usize> {
        match action {
            Action::PerformScrub => Some(self.scrub_master),
            Action::CrossDcu { origin, .. } => Some(origin),
            _ => None,
        }
    }

    /// Every synchronized action with its participating partitions.
    pub fn shared_actions(&self) -> BTreeMap<Action, Vec<usize>> {
        let mut out = BTreeMap::new();
        if self.partitions > 1 {
            out.insert(Action::PerformScrub, (0..self.partitions).collect());
        }
        for &(i, j) in &self.cross_dcu_pairs {
            out.insert(Action::CrossDcu { origin: i, target: j }, alloc::vec![i, j]);
            out.insert(Action::CrossDcu { origin: j, target: i }, alloc::vec![i, j]);
        }
        out
    }

    fn check(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &(i, j) in &self.cross_dcu_pairs {
            if i >= j || j >= self.partitions || !seen.insert((i, j)) {
                return Err(Error::Unsynchronized(Action::CrossDcu { origin: i, target: j }));
            }
        }
        if self.scrub_master >= self.partitions {
            return Err(Error::Unsynchronized(Action::PerformScrub));
        }
        Ok(())
    }
}

fn push_scu(m: &mut CtmcModule, rates: &PartitionRates, scrub_rate: f64) {
    let p = m.partition;
    let lambda = rates.lambda_scu;
    m.push(Operational, Degraded, Action::Scu1(p), 3.0 * lambda);
    m.push(Degraded, Failed, Action::Scu2(p), 2.0 * lambda);
    for from in [Operational, Degraded, Failed] {
        m.push(from, Operational, Action::PerformScrub, scrub_rate);
    }
}

/// SCU-prone partition: `3 -> 2` at `3 lambda`, `2 -> 1` at `2 lambda`, and a
/// scrub from every state (a self-loop at 3).
pub fn build_scu_partition(partition: usize, rates: &PartitionRates, scrub_rate: f64) -> CtmcModule {
    let mut m = CtmcModule::new(partition, ModelKind::ScuOnly);
    push_scu(&mut m, rates, scrub_rate);
    m
}

/// SCU- and DCU-prone partition: the SCU chain plus `3 -> 1` at `3 beta` and
/// `2 -> 1` at `2 beta`.
pub fn build_combined_partition(
    partition: usize,
    rates: &PartitionRates,
    scrub_rate: f64,
) -> CtmcModule {
    let mut m = CtmcModule::new(partition, ModelKind::Combined);
    push_scu(&mut m, rates, scrub_rate);
    m.push(Operational, Failed, Action::Dcu1(partition), 3.0 * rates.beta);
    m.push(Degraded, Failed, Action::Dcu2(partition), 2.0 * rates.beta);
    m
}

/// Adds the cross-partition DCU actions of every pair in `sync`.
pub fn add_cross_dcu_actions(
    modules: &mut [CtmcModule],
    rates: &[PartitionRates],
    sync: &SyncSpec,
) -> Result<()> {
    sync.check()?;
    if modules.iter().any(|m| m.kind == ModelKind::ScuOnly) && !sync.cross_dcu_pairs.is_empty() {
        return Err(Error::CrossDcuOnScuModel);
    }
    let position = |modules: &[CtmcModule], p: usize| {
        modules
            .iter()
            .position(|m| m.partition == p)
            .ok_or(Error::Unsynchronized(Action::CrossDcu { origin: p, target: p }))
    };
    for &(i, j) in &sync.cross_dcu_pairs {
        let (mi, mj) = (position(modules, i)?, position(modules, j)?);
        for (origin, target, mo, mt) in [(i, j, mi, mj), (j, i, mj, mi)] {
            let action = Action::CrossDcu { origin, target };
            let beta1 = rates[origin].beta1;
            for from in [Operational, Degraded] {
                let to = from.down_one().unwrap();
                let k = f64::from(from.value());
                modules[mo].push(from, to, action, k * beta1);
                modules[mt].push(from, to, action, 1.0);
            }
        }
    }
    Ok(())
}

/// Product chain under construction; states indexed lexicographically.
struct Partial {
    n: usize,
    alphabet: BTreeSet<Action>,
    out: Vec<Vec<(usize, Action, f64)>>,
}

impl Partial {
    fn from_module(m: &CtmcModule) -> Self {
        let mut out = alloc::vec![Vec::new(); 3];
        for t in &m.transitions {
            out[t.from.index()].push((t.to.index(), t.action, t.rate));
        }
        Self {
            n: 3,
            alphabet: m.alphabet.clone(),
            out,
        }
    }

    /// Shared actions fire jointly with the product of their rates; all
    /// others interleave.
    fn product(&self, other: &Partial) -> Partial {
        let shared: BTreeSet<Action> = self.alphabet.intersection(&other.alphabet).copied().collect();
        let nb = other.n;
        let mut out = Vec::with_capacity(self.n * nb);
        for sa in 0..self.n {
            for sb in 0..nb {
                let mut row = Vec::new();
                for &(ta, act, r) in &self.out[sa] {
                    if !shared.contains(&act) {
                        row.push((ta * nb + sb, act, r));
                    }
                }
                for &(tb, act, r) in &other.out[sb] {
                    if !shared.contains(&act) {
                        row.push((sa * nb + tb, act, r));
                    }
                }
                for &(ta, act, ra) in self.out[sa].iter().filter(|t| shared.contains(&t.1)) {
                    for &(tb, _, rb) in other.out[sb].iter().filter(|t| t.1 == act) {
                        row.push((ta * nb + tb, act, ra * rb));
                    }
                }
                out.push(row);
            }
        }
        Partial {
            n: self.n * nb,
            alphabet: self.alphabet.union(&other.alphabet).copied().collect(),
            out,
        }
    }
}

/// Parallel composition, folded left over `modules` in partition order.
pub fn compose(modules: &[CtmcModule], sync: &SyncSpec) -> Result<ComposedCtmc> {
    let first = modules.first().ok_or(Error::NoModules)?;
    if modules.len() > MAX_PARTITIONS {
        return Err(Error::StateSpaceTooLarge {
            partitions: modules.len(),
        });
    }
    sync.check()?;
    // Any action known to two modules must be declared, with exactly its
    // declared participants.
    let declared = sync.shared_actions();
    let mut owners: BTreeMap<Action, Vec<usize>> = BTreeMap::new();
    for m in modules {
        for &a in &m.alphabet {
            owners.entry(a).or_default().push(m.partition);
        }
    }
    for (action, who) in &owners {
        match declared.get(action) {
            Some(parts) if parts == who => {}
            None if who.len() == 1 => {}
            _ => return Err(Error::Unsynchronized(*action)),
        }
    }
    for (action, parts) in &declared {
        if !owners.contains_key(action) && !parts.is_empty() && !action.is_scrub() {
            return Err(Error::Unsynchronized(*action));
        }
    }

    let mut acc = Partial::from_module(first);
    for m in &modules[1..] {
        acc = acc.product(&Partial::from_module(m));
    }
    let transitions = acc
        .out
        .iter()
        .enumerate()
        .flat_map(|(from, row)| {
            row.iter().map(move |&(to, action, rate)| Transition {
                from,
                to,
                action,
                rate,
            })
        })
        .collect();
    Ok(ComposedCtmc::new(first.kind, modules.len(), transitions))
}

/// Builds the synchronized partition modules for `rates`.
pub fn build_partitions(
    kind: ModelKind,
    rates: &[PartitionRates],
    mu: f64,
) -> Result<(Vec<CtmcModule>, SyncSpec)> {
    let sync = SyncSpec::new(rates.len(), kind);
    let mut modules: Vec<CtmcModule> = rates
        .iter()
        .enumerate()
        .map(|(p, r)| {
            let scrub = sync.scrub_rate(p, mu);
            match kind {
                ModelKind::ScuOnly => build_scu_partition(p, r, scrub),
                ModelKind::Combined => build_combined_partition(p, r, scrub),
            }
        })
        .collect();
    if kind == ModelKind::Combined {
        add_cross_dcu_actions(&mut modules, rates, &sync)?;
    }
    Ok((modules, sync))
}

/// Builds and composes the whole model. `mu = 0` disables scrubbing.
pub fn build_model(kind: ModelKind, rates: &[PartitionRates], mu: f64) -> Result<ComposedCtmc> {
    if rates.iter().any(|r| {
        [r.lambda_scu, r.beta, r.beta1]
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
    }) || !(mu.is_finite() && mu >= 0.0)
    {
        return Err(Error::NonFiniteRate);
    }
    let (modules, sync) = build_partitions(kind, rates, mu)?;
    compose(&modules, &sync)
}
