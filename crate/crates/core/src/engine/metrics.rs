use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::steady::steady_state;
use super::transient::{transient, transient_with_occupation};
use crate::composed::{ComposedCtmc, StateLabel};
use crate::sparse::RateMatrix;
use crate::{Error, Result};

/// `P[G[0,t] safe]`: probability of staying inside `safe` over `[0, t]`.
/// Unsafe states are made absorbing and the surviving mass is summed.
pub fn globally(rates: &RateMatrix, init: &[f64], safe: &[bool], t: f64, eps: f64) -> Result<f64> {
    if !safe.iter().any(|&s| s) {
        return Err(Error::NoUpStates);
    }
    let absorbing: Vec<bool> = safe.iter().map(|s| !s).collect();
    let absorbed = rates.make_absorbing(&absorbing);
    if !reaches(&absorbed, init, &absorbing) {
        return Ok(mass(init, safe));
    }
    let r = transient(&absorbed, t, init, eps)?;
    Ok(mass(&r.distribution, safe).clamp(0.0, 1.0))
}

/// `P[F[0,t] target]`: probability of reaching `target` within `[0, t]`.
pub fn eventually(rates: &RateMatrix, init: &[f64], target: &[bool], t: f64, eps: f64) -> Result<f64> {
    let absorbed = rates.make_absorbing(target);
    if !reaches(&absorbed, init, target) {
        return Ok(mass(init, target));
    }
    let r = transient(&absorbed, t, init, eps)?;
    Ok(mass(&r.distribution, target).clamp(0.0, 1.0))
}

/// Expected time spent in `reward` states over `[0, t]`.
pub fn occupation(rates: &RateMatrix, init: &[f64], reward: &[bool], t: f64, eps: f64) -> Result<f64> {
    let outside: Vec<bool> = reward.iter().map(|r| !r).collect();
    if !reaches(rates, init, &outside) {
        return Ok(t * mass(init, reward));
    }
    let (_, occ, _) = transient_with_occupation(rates, t, init, eps)?;
    Ok(mass(&occ, reward))
}

/// Graph precomputation: can any state in `goal` be reached from a state
/// in the support of `init` (staying put counts)? When it cannot, the
/// numerical answers are exact and uniformization is skipped.
fn reaches(rates: &RateMatrix, init: &[f64], goal: &[bool]) -> bool {
    if init.len() != rates.n() {
        // Let the transient solver report the shape error.
        return true;
    }
    let mut seen = vec![false; rates.n()];
    let mut queue: VecDeque<usize> = init
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, _)| i)
        .collect();
    for &i in &queue {
        seen[i] = true;
    }
    while let Some(s) = queue.pop_front() {
        if goal[s] {
            return true;
        }
        for (j, _) in rates.row(s) {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    false
}

fn mass(v: &[f64], mask: &[bool]) -> f64 {
    v.iter().zip(mask).filter(|(_, &m)| m).map(|(p, _)| p).sum()
}

/// Probability that the system never leaves the up states during `[0, t]`.
pub fn reliability(c: &ComposedCtmc, t: f64, eps: f64) -> Result<f64> {
    globally(c.rates(), &c.initial_distribution(), &c.up_mask(), t, eps)
}

/// Reliability over the strict all-operational label instead of `up`.
pub fn strict_reliability(c: &ComposedCtmc, t: f64, eps: f64) -> Result<f64> {
    let mask = c.label_mask(StateLabel::Operational);
    globally(c.rates(), &c.initial_distribution(), &mask, t, eps)
}

/// Expected fraction of `[0, t]` spent in up states.
pub fn availability(c: &ComposedCtmc, t: f64, eps: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    let up = occupation(c.rates(), &c.initial_distribution(), &c.up_mask(), t, eps)?;
    Ok((up / t).clamp(0.0, 1.0))
}

/// Long-run probability of the states flagged in `mask`.
pub fn steady_state_mass(c: &ComposedCtmc, mask: &[bool]) -> Result<f64> {
    let pi = steady_state(c.rates())?;
    Ok(mass(&pi, mask).clamp(0.0, 1.0))
}

/// States reachable from `from` over positive-rate transitions.
pub fn reachable(rates: &RateMatrix, from: usize) -> Vec<bool> {
    let mut seen = vec![false; rates.n()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(s) = queue.pop_front() {
        for (j, _) in rates.row(s) {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

/// Every state reachable from `initial` has a one-step positive-rate
/// transition (self-loops count) into `target`.
pub fn forall_next(rates: &RateMatrix, initial: usize, target: &[bool]) -> bool {
    reachable(rates, initial)
        .iter()
        .enumerate()
        .filter(|(_, &r)| r)
        .all(|(s, _)| rates.row(s).any(|(j, v)| target[j] && v > 0.0))
}

/// From every reachable state the global-operational state is one step away.
pub fn check_scrub_recoverability(c: &ComposedCtmc) -> bool {
    let mut target = vec![false; c.len()];
    target[c.operational_state()] = true;
    forall_next(c.rates(), c.initial_state(), &target)
}
