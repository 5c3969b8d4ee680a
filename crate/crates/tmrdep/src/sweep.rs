//! Design-space sweeps over model kind, partition count and scrub interval.

use rayon::prelude::*;
use tmrdep_core::composed::StateLabel;
use tmrdep_core::partition::plan_partitions;
use tmrdep_core::rates::partition_rates;
use tmrdep_core::simulator::{SimEstimate, SimTally, Simulator};
use tmrdep_core::{
    build_model, engine, ComponentLibrary, ComposedCtmc, Dfg, ModelKind, PartitionPlan,
    PartitionRates, RateParams,
};

use crate::config::{AnalysisConfig, PartitionSpec};
use crate::error::{Error, Result};
use crate::units::format_duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Analytic,
    Simulated,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Analytic => "analytic",
            Source::Simulated => "simulated",
        }
    }
}

/// One CSV line. Unrequested metrics are `None` and render empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model: ModelKind,
    pub partitions: usize,
    pub scrub_interval_s: f64,
    pub mission_time_s: f64,
    pub reliability: Option<f64>,
    pub availability: Option<f64>,
    pub steady_state_up: Option<f64>,
    pub recoverable: Option<bool>,
    pub states: usize,
    pub transitions: usize,
    pub source: Source,
}

pub const CSV_HEADER: [&str; 11] = [
    "model",
    "partitions",
    "scrub_interval_s",
    "mission_time_s",
    "reliability",
    "availability",
    "steady_state_up",
    "recoverable",
    "states",
    "transitions",
    "source",
];

/// Decimal notation with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.11}", 0.0);
    }
    // The exponent after rounding to 12 digits decides the decimal count.
    let sci = format!("{:.11e}", x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Header plus one line per row, in row order.
pub fn emit_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    let opt = |v: Option<f64>| v.map(format_sig12).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.model.as_str().to_string(),
            r.partitions.to_string(),
            format_sig12(r.scrub_interval_s),
            format_sig12(r.mission_time_s),
            opt(r.reliability),
            opt(r.availability),
            opt(r.steady_state_up),
            r.recoverable.map(|b| b.to_string()).unwrap_or_default(),
            r.states.to_string(),
            r.transitions.to_string(),
            r.source.as_str().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Runs `f` on a pool of `jobs` threads; `0` uses every core.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Monte Carlo estimate with chunks run on the current rayon pool and merged
/// in chunk order; bitwise equal to the sequential simulator.
pub fn simulate_parallel(chain: &ComposedCtmc, horizon: f64, trials: u64, seed: u64) -> (SimEstimate, SimEstimate) {
    let sim = Simulator::new(chain);
    let tallies: Vec<SimTally> = (0..Simulator::chunk_count(trials))
        .into_par_iter()
        .map(|chunk| sim.run_chunk(horizon, trials, seed, chunk))
        .collect();
    let mut total = SimTally::default();
    for t in &tallies {
        total.merge(t);
    }
    total.estimates(seed)
}

/// Partition plans requested by the config, in config order.
pub fn plans(cfg: &AnalysisConfig, dfg: &Dfg) -> Result<Vec<PartitionPlan>> {
    let with_terminal = |mut p: PartitionPlan| {
        p.include_terminal_voter_partition = cfg.terminal_voter_partition;
        p
    };
    match &cfg.partitions {
        PartitionSpec::Counts(counts) => counts
            .iter()
            .map(|&n| Ok(with_terminal(plan_partitions(dfg, n)?)))
            .collect(),
        PartitionSpec::Cuts(cuts) => {
            let plan = with_terminal(PartitionPlan::new(cuts.clone(), false));
            let violations = plan.validate(dfg);
            if violations.is_empty() {
                Ok(vec![plan])
            } else {
                let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
                Err(Error::Config(format!("cuts: {}", text.join("; "))))
            }
        }
    }
}

/// Per-partition rates for one design point with scrub interval `tau`.
pub fn point_rates(
    dfg: &Dfg,
    lib: &ComponentLibrary,
    plan: &PartitionPlan,
    params: &RateParams,
    kind: ModelKind,
    tau: f64,
) -> Result<(Vec<PartitionRates>, f64)> {
    let params = RateParams {
        mu: 1.0 / tau,
        ..params.clone()
    };
    Ok((partition_rates(dfg, lib, plan, &params, kind)?, params.mu))
}

fn reliability_for(chain: &ComposedCtmc, label: StateLabel, t: f64, eps: f64) -> tmrdep_core::Result<f64> {
    match label {
        StateLabel::Operational => engine::strict_reliability(chain, t, eps),
        _ => engine::reliability(chain, t, eps),
    }
}

struct Point<'a> {
    kind: ModelKind,
    plan: &'a PartitionPlan,
    tau: f64,
}

impl Point<'_> {
    fn context(&self) -> String {
        format!(
            "design point model={} partitions={} scrub={}",
            self.kind,
            self.plan.partition_count() + usize::from(self.plan.include_terminal_voter_partition),
            format_duration(self.tau)
        )
    }
}

fn evaluate_point(
    cfg: &AnalysisConfig,
    dfg: &Dfg,
    lib: &ComponentLibrary,
    point: &Point<'_>,
    seed: u64,
) -> tmrdep_core::Result<Vec<SweepRow>> {
    let (rates, mu) = point_rates(dfg, lib, point.plan, &cfg.params, point.kind, point.tau)
        .map_err(|e| match e {
            Error::Model(e) => e,
            other => unreachable!("rate computation only fails in the model layer: {other}"),
        })?;
    let chain = build_model(point.kind, &rates, mu)?;
    let t = cfg.params.mission_time;
    let o = cfg.outputs;
    let base = SweepRow {
        model: point.kind,
        partitions: chain.partitions(),
        scrub_interval_s: point.tau,
        mission_time_s: t,
        reliability: None,
        availability: None,
        steady_state_up: None,
        recoverable: None,
        states: chain.len(),
        transitions: chain.transition_count(),
        source: Source::Analytic,
    };
    let analytic = SweepRow {
        reliability: o
            .reliability
            .then(|| reliability_for(&chain, cfg.reliability_label, t, cfg.epsilon))
            .transpose()?,
        availability: o
            .availability
            .then(|| engine::availability(&chain, t, cfg.epsilon))
            .transpose()?,
        steady_state_up: o
            .steady_state
            .then(|| engine::steady_state_mass(&chain, &chain.up_mask()))
            .transpose()?,
        recoverable: o.correctness.then(|| engine::check_scrub_recoverability(&chain)),
        ..base.clone()
    };
    let mut rows = vec![analytic];
    if cfg.simulate_trials > 0 {
        let (rel, avail) = simulate_parallel(&chain, t, cfg.simulate_trials, seed);
        rows.push(SweepRow {
            reliability: o.reliability.then_some(rel.estimate),
            availability: o.availability.then_some(avail.estimate),
            source: Source::Simulated,
            ..base
        });
    }
    Ok(rows)
}

/// Evaluates every `(model, plan, tau)` point of the grid on `jobs` threads.
///
/// Rows come out in grid order: model kinds outermost, scrub intervals
/// innermost, each analytic row followed by its simulated row when
/// `simulate_trials > 0`. The simulated row of point `k` uses seed
/// `cfg.seed + k`.
pub fn run_sweep(cfg: &AnalysisConfig, dfg: &Dfg, lib: &ComponentLibrary, jobs: usize) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let violations = lib.validate_for(dfg);
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::Library(text.join("; ")));
    }
    let plans = plans(cfg, dfg)?;
    let points: Vec<Point<'_>> = cfg
        .models
        .iter()
        .flat_map(|&kind| {
            plans.iter().flat_map(move |plan| {
                cfg.scrub_intervals.iter().map(move |&tau| Point { kind, plan, tau })
            })
        })
        .collect();
    let rows: Vec<Vec<SweepRow>> = with_jobs(jobs, || {
        points
            .par_iter()
            .enumerate()
            .map(|(k, p)| {
                evaluate_point(cfg, dfg, lib, p, cfg.seed.wrapping_add(k as u64)).map_err(|source| {
                    Error::DesignPoint {
                        context: p.context(),
                        source,
                    }
                })
            })
            .collect::<Result<_>>()
    })?;
    Ok(rows.into_iter().flatten().collect())
}

/// Finds `lambda_bit` such that reliability at the design point
/// `(kind, plan, tau)` equals `target`, by bisection on `log(lambda_bit)`.
///
/// Reliability decreases in `lambda_bit`; the bracket is grown from
/// `params.lambda_bit` by factors of ten.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_lambda_bit(
    dfg: &Dfg,
    lib: &ComponentLibrary,
    plan: &PartitionPlan,
    params: &RateParams,
    kind: ModelKind,
    tau: f64,
    target: f64,
    eps: f64,
) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Config(format!("calibration target {target} must lie in (0, 1)")));
    }
    let rel = |lambda_bit: f64| -> Result<f64> {
        let p = RateParams {
            lambda_bit,
            ..params.clone()
        };
        let (rates, mu) = point_rates(dfg, lib, plan, &p, kind, tau)?;
        let chain = build_model(kind, &rates, mu)?;
        Ok(engine::reliability(&chain, p.mission_time, eps)?)
    };
    let start = if params.lambda_bit > 0.0 { params.lambda_bit } else { 1e-12 };
    let (mut lo, mut hi) = (start, start);
    for _ in 0..60 {
        if rel(lo)? >= target {
            break;
        }
        lo /= 10.0;
    }
    for _ in 0..60 {
        if rel(hi)? <= target {
            break;
        }
        hi *= 10.0;
    }
    if !(rel(lo)? >= target && rel(hi)? <= target) {
        return Err(Error::Config(format!("reliability {target} cannot be bracketed")));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if hi / lo - 1.0 < 1e-13 {
            break;
        }
        if rel(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}
