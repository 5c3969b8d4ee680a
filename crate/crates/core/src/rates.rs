//! Failure-rate arithmetic: modules, domains and the SCU/DCU split.

use alloc::vec::Vec;

use crate::model::{ComponentLibrary, Dfg, ModelKind, PartitionPlan, PartitionRates, RateParams};
use crate::{Error, Result};

/// `lambda_bit * critical_bits(kind)`.
pub fn module_rate(lib: &ComponentLibrary, kind: &str, lambda_bit: f64) -> Result<f64> {
    lib.critical_bits(kind)
        .map(|bits| lambda_bit * bits as f64)
        .ok_or_else(|| Error::MissingKind(kind.into()))
}

/// Domain failure rate: sum of its module rates plus one input voter.
/// The first partition reads primary inputs and has no voter.
pub fn domain_rate(module_rates: &[f64], lambda_voter: f64, partition_index: usize) -> f64 {
    let modules: f64 = module_rates.iter().sum();
    if partition_index <= 1 {
        modules
    } else {
        modules + lambda_voter
    }
}

/// Scales a domain rate into the SCU rate and the two DCU pair rates.
///
/// Without explicit gammas, `beta = beta1 = alpha_dcu * lambda_domain`, so
/// `lambda_scu + beta == lambda_domain`.
pub fn split_rates(lambda_domain: f64, params: &RateParams) -> PartitionRates {
    let dcu = params.alpha_dcu * lambda_domain;
    PartitionRates {
        lambda_domain,
        lambda_scu: params.alpha_scu * lambda_domain,
        beta: params.gamma_same.map_or(dcu, |g| 2.0 * g),
        beta1: params.gamma_cross.map_or(dcu, |g| 3.0 * g),
        voter_included: false,
    }
}

/// Rates for every partition of `plan`, including the terminal voter
/// partition when the plan asks for it.
///
/// The SCU-only model carries the whole domain hazard as SCUs.
pub fn partition_rates(
    dfg: &Dfg,
    lib: &ComponentLibrary,
    plan: &PartitionPlan,
    params: &RateParams,
    kind: ModelKind,
) -> Result<Vec<PartitionRates>> {
    let mut domains = Vec::with_capacity(plan.partition_count());
    for (g, group) in plan.cuts.iter().enumerate() {
        let mut modules = Vec::with_capacity(group.len());
        for id in group {
            let node = dfg.node(id).ok_or_else(|| {
                Error::Invalid(alloc::vec![crate::model::Violation::new(
                    crate::model::Invariant::UnknownNode,
                    id
                )])
            })?;
            modules.push(module_rate(lib, &node.kind, params.lambda_bit)?);
        }
        domains.push(domain_rate(&modules, params.lambda_voter, g + 1));
    }
    if plan.include_terminal_voter_partition {
        domains.push(domain_rate(&[], params.lambda_voter, plan.cuts.len() + 1));
    }
    Ok(domains
        .into_iter()
        .enumerate()
        .map(|(i, lambda)| {
            let mut r = match kind {
                ModelKind::ScuOnly => PartitionRates::scu(lambda),
                ModelKind::Combined => split_rates(lambda, params),
            };
            r.voter_included = i > 0 && params.lambda_voter > 0.0;
            r
        })
        .collect())
}
