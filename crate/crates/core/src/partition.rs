//! Splits a DFG into contiguous topological blocks.

use alloc::vec::Vec;

use crate::model::{Dfg, PartitionPlan};
use crate::{Error, Result};

/// Cuts the stable topological order of `dfg` into `n` contiguous blocks whose
/// sizes differ by at most one, larger blocks first.
pub fn plan_partitions(dfg: &Dfg, n: usize) -> Result<PartitionPlan> {
    if n == 0 || n > dfg.len() {
        return Err(Error::PartitionCount {
            requested: n,
            nodes: dfg.len(),
        });
    }
    let violations = dfg.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let order = dfg.topological_order().expect("validated DFG is acyclic");
    let (base, extra) = (order.len() / n, order.len() % n);
    let mut cuts = Vec::with_capacity(n);
    let mut rest = order.as_slice();
    for g in 0..n {
        let (head, tail) = rest.split_at(base + usize::from(g < extra));
        cuts.push(head.iter().map(|&i| dfg.nodes()[i].id.clone()).collect());
        rest = tail;
    }
    Ok(PartitionPlan::new(cuts, false))
}
