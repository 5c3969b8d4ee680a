//! Discrete-event Monte Carlo over a composed chain.
//!
//! Each trial follows the jump process from the initial state: the holding
//! time in state `s` is exponential with the total exit rate (self-loops are
//! skipped, they never change the trajectory) and the successor is drawn in
//! proportion to the outgoing rates, which is the law of the exponential race.
//!
//! Random numbers come from ChaCha8 (`rand_chacha`). Trials are processed in
//! fixed chunks of [`CHUNK_TRIALS`]; chunk `k` uses the generator seeded with
//! `seed_from_u64(seed)` on stream `k`. Chunk tallies are merged in chunk
//! order, so a parallel run that merges in the same order is bit-identical to
//! [`simulate`].

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::composed::ComposedCtmc;

pub const CHUNK_TRIALS: u64 = 4096;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Reliability,
    Availability,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub metric: Metric,
    pub estimate: f64,
    /// Half-width of the 99% interval.
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SimEstimate {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Running sums over finished trials.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimTally {
    pub trials: u64,
    /// Trials that never entered a down state before the horizon.
    pub survived: u64,
    pub up_fraction_sum: f64,
    pub up_fraction_sq_sum: f64,
}

impl SimTally {
    pub fn merge(&mut self, other: &SimTally) {
        self.trials += other.trials;
        self.survived += other.survived;
        self.up_fraction_sum += other.up_fraction_sum;
        self.up_fraction_sq_sum += other.up_fraction_sq_sum;
    }

    /// Wilson score interval for reliability, normal interval for
    /// availability. The normal interval is unreliable when nearly every trial
    /// has up fraction exactly 1.
    pub fn estimates(&self, seed: u64) -> (SimEstimate, SimEstimate) {
        let n = self.trials.max(1) as f64;
        let p = self.survived as f64 / n;
        let z2 = Z_99 * Z_99;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let spread = Z_99 / denom * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
        let lo = if self.survived == 0 { 0.0 } else { (center - spread).max(0.0) };
        let hi = if self.survived == self.trials { 1.0 } else { (center + spread).min(1.0) };
        let rel = SimEstimate {
            metric: Metric::Reliability,
            estimate: p,
            half_width: (hi - lo) / 2.0,
            lower: lo,
            upper: hi,
            trials: self.trials,
            seed,
        };

        let mean = self.up_fraction_sum / n;
        let var = if self.trials > 1 {
            ((self.up_fraction_sq_sum - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let hw = Z_99 * libm::sqrt(var / n);
        let avail = SimEstimate {
            metric: Metric::Availability,
            estimate: mean.clamp(0.0, 1.0),
            half_width: hw,
            lower: mean - hw,
            upper: mean + hw,
            trials: self.trials,
            seed,
        };
        (rel, avail)
    }
}

/// Precomputed jump tables for one chain.
pub struct Simulator<'a> {
    chain: &'a ComposedCtmc,
    exit: Vec<f64>,
    /// Per state: successors and cumulative rates.
    jumps: Vec<Vec<(usize, f64)>>,
    up: Vec<bool>,
}

impl<'a> Simulator<'a> {
    pub fn new(chain: &'a ComposedCtmc) -> Self {
        let rates = chain.rates();
        let mut exit = Vec::with_capacity(chain.len());
        let mut jumps = Vec::with_capacity(chain.len());
        for s in 0..chain.len() {
            let mut acc = 0.0;
            let row: Vec<(usize, f64)> = rates
                .row(s)
                .filter(|&(j, v)| j != s && v > 0.0)
                .map(|(j, v)| {
                    acc += v;
                    (j, acc)
                })
                .collect();
            exit.push(acc);
            jumps.push(row);
        }
        Self {
            chain,
            exit,
            jumps,
            up: chain.up_mask(),
        }
    }

    pub fn chunk_count(trials: u64) -> u64 {
        trials.div_ceil(CHUNK_TRIALS)
    }

    /// Trials of chunk `chunk` out of a run of `trials`.
    pub fn run_chunk(&self, horizon: f64, trials: u64, seed: u64, chunk: u64) -> SimTally {
        self.run_chunk_observed(horizon, trials, seed, chunk, &mut |_, _| {})
    }

    /// As [`run_chunk`](Self::run_chunk), reporting every jump `(from, to)`.
    pub fn run_chunk_observed(
        &self,
        horizon: f64,
        trials: u64,
        seed: u64,
        chunk: u64,
        observer: &mut dyn FnMut(usize, usize),
    ) -> SimTally {
        let start = chunk * CHUNK_TRIALS;
        let count = trials.saturating_sub(start).min(CHUNK_TRIALS);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let mut tally = SimTally::default();
        for _ in 0..count {
            let (survived, frac) = self.trial(&mut rng, horizon, observer);
            tally.trials += 1;
            tally.survived += u64::from(survived);
            tally.up_fraction_sum += frac;
            tally.up_fraction_sq_sum += frac * frac;
        }
        tally
    }

    fn trial(
        &self,
        rng: &mut ChaCha8Rng,
        horizon: f64,
        observer: &mut dyn FnMut(usize, usize),
    ) -> (bool, f64) {
        let mut s = self.chain.initial_state();
        let mut survived = self.up[s];
        if horizon <= 0.0 {
            return (survived, if self.up[s] { 1.0 } else { 0.0 });
        }
        let (mut t, mut up_time) = (0.0, 0.0);
        loop {
            let exit = self.exit[s];
            let dwell = if exit > 0.0 {
                -libm::log(open_unit(rng)) / exit
            } else {
                f64::INFINITY
            };
            let end = (t + dwell).min(horizon);
            if self.up[s] {
                up_time += end - t;
            }
            if t + dwell >= horizon {
                break;
            }
            t += dwell;
            let target = unit(rng) * exit;
            let row = &self.jumps[s];
            let next = row
                .iter()
                .find(|&&(_, cum)| target < cum)
                .unwrap_or(row.last().expect("exit > 0"))
                .0;
            observer(s, next);
            s = next;
            survived &= self.up[s];
        }
        (survived, (up_time / horizon).clamp(0.0, 1.0))
    }
}

/// Uniform in `[0, 1)` with 53 random bits.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `(0, 1]`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Runs `trials` trials sequentially and returns the reliability and
/// availability estimates.
pub fn simulate(chain: &ComposedCtmc, horizon: f64, trials: u64, seed: u64) -> (SimEstimate, SimEstimate) {
    let sim = Simulator::new(chain);
    let mut tally = SimTally::default();
    for chunk in 0..Simulator::chunk_count(trials) {
        tally.merge(&sim.run_chunk(horizon, trials, seed, chunk));
    }
    tally.estimates(seed)
}
