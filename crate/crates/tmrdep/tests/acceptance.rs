//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails. Run with
//! `cargo test -p tmrdep --test acceptance`.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use tmrdep::config::{AnalysisConfig, PartitionSpec};
use tmrdep::core::engine::{availability, check_scrub_recoverability, reliability, steady_state, transient};
use tmrdep::core::partition::plan_partitions;
use tmrdep::core::{build_model, ComponentLibrary, Dfg, ModelKind, PartitionRates, RateMatrix, RateParams, HOUR};
use tmrdep::dfg_file::parse_dfg;
use tmrdep::library::parse_library;
use tmrdep::sweep::{calibrate_lambda_bit, point_rates, run_sweep, simulate_parallel, with_jobs, SweepRow};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
const EPS: f64 = 1e-12;
const MIN: f64 = 60.0;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Design {
    dfg: Dfg,
    lib: ComponentLibrary,
    cfg: AnalysisConfig,
}

fn design() -> Design {
    let cfg = AnalysisConfig::load(&Path::new(DATA).join("sweep.toml")).expect("sweep.toml");
    let lib = parse_library(&std::fs::read_to_string(cfg.library.as_ref().unwrap()).unwrap()).unwrap();
    let dfg = parse_dfg(&std::fs::read_to_string(cfg.dfg.as_ref().unwrap()).unwrap(), Some(&lib)).unwrap();
    Design { dfg, lib, cfg }
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

fn state_counts(d: &Design) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [1, 2, 4, 8] {
        let plan = plan_partitions(&d.dfg, n).map_err(|e| e.to_string())?;
        for kind in [ModelKind::ScuOnly, ModelKind::Combined] {
            let (rates, mu) = point_rates(&d.dfg, &d.lib, &plan, &d.cfg.params, kind, 15.0 * MIN).map_err(|e| e.to_string())?;
            let start = Instant::now();
            let c = build_model(kind, &rates, mu).map_err(|e| e.to_string())?;
            let elapsed = start.elapsed();
            let limit = Duration::from_secs(if n <= 4 { 1 } else { 30 });
            let want = 3usize.pow(n as u32);
            ok &= c.len() == want && within(elapsed, limit);
            detail.push(format!("{kind} N={n}: {} states in {elapsed:.2?}", c.len()));
        }
    }
    ensure(ok, detail.join("; "))
}

fn closed_form() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let lambda = 1e-4 * 10f64.powf(i as f64 / 5.0);
        let t = 10.0 + 97.0 * i as f64;
        let c = build_model(ModelKind::ScuOnly, &[PartitionRates::scu(lambda)], 0.0).map_err(|e| e.to_string())?;
        let got = reliability(&c, t, EPS).map_err(|e| e.to_string())?;
        let want = 3.0 * (-2.0 * lambda * t).exp() - 2.0 * (-3.0 * lambda * t).exp();
        worst = worst.max((got - want).abs());
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-9 && within(elapsed, Duration::from_secs(1)), format!("20 points, max error {worst:.2e}, {elapsed:.2?}"))
}

fn balance() -> Outcome {
    let start = Instant::now();
    let c = build_model(ModelKind::ScuOnly, &[PartitionRates::scu(1.0)], 10.0).map_err(|e| e.to_string())?;
    let pi = steady_state(c.rates()).map_err(|e| e.to_string())?;
    // Index 0 is the failed local state, index 2 the operational one.
    let want = [0.5 / 13.0, 2.5 / 13.0, 10.0 / 13.0];
    let worst = pi.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let elapsed = start.elapsed();
    ensure(worst <= 1e-10 && within(elapsed, Duration::from_secs(1)), format!("max error {worst:.2e}, {elapsed:.2?}"))
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Classical RK4 on `d pi / dt = pi Q` with `h * max_exit <= 0.005`.
fn rk4(rates: &[Vec<f64>], init: &[f64], t: f64) -> Vec<f64> {
    let n = rates.len();
    let exit: Vec<f64> = (0..n).map(|i| (0..n).filter(|&j| j != i).map(|j| rates[i][j]).sum()).collect();
    let max_exit = exit.iter().cloned().fold(0.0, f64::max);
    let deriv = |p: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|j| (0..n).filter(|&i| i != j).map(|i| p[i] * rates[i][j]).sum::<f64>() - p[j] * exit[j])
            .collect()
    };
    let steps = ((t * max_exit / 0.005).ceil() as usize).max(200);
    let h = t / steps as f64;
    let mut p = init.to_vec();
    for _ in 0..steps {
        let k1 = deriv(&p);
        let k2 = deriv(&(0..n).map(|i| p[i] + 0.5 * h * k1[i]).collect::<Vec<_>>());
        let k3 = deriv(&(0..n).map(|i| p[i] + 0.5 * h * k2[i]).collect::<Vec<_>>());
        let k4 = deriv(&(0..n).map(|i| p[i] + h * k3[i]).collect::<Vec<_>>());
        for i in 0..n {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    p
}

fn ode_cross_check() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = 2 + (rng.next_u64() % 26) as usize;
        let dense: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| if uniform(&mut rng) < 0.4 { 5.0 * uniform(&mut rng) } else { 0.0 }).collect())
            .collect();
        let mut init = vec![0.0; n];
        init[(rng.next_u64() % n as u64) as usize] = 1.0;
        let t = 0.1 + 2.9 * uniform(&mut rng);
        let got = transient(&RateMatrix::from_dense(&dense), t, &init, EPS).map_err(|e| e.to_string())?;
        let want = rk4(&dense, &init, t);
        worst = got.distribution.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-6 && within(elapsed, Duration::from_secs(60)), format!("50 chains, max error {worst:.2e}, {elapsed:.2?}"))
}

fn monte_carlo(d: &Design) -> Outcome {
    let start = Instant::now();
    let plan = plan_partitions(&d.dfg, 2).map_err(|e| e.to_string())?;
    let kind = ModelKind::Combined;
    let (rates, mu) = point_rates(&d.dfg, &d.lib, &plan, &d.cfg.params, kind, HOUR).map_err(|e| e.to_string())?;
    let c = build_model(kind, &rates, mu).map_err(|e| e.to_string())?;
    let t = d.cfg.params.mission_time;
    let r = reliability(&c, t, EPS).map_err(|e| e.to_string())?;
    let a = availability(&c, t, EPS).map_err(|e| e.to_string())?;
    let (er, ea) = with_jobs(0, || simulate_parallel(&c, t, 100_000, d.cfg.seed));
    let elapsed = start.elapsed();
    ensure(
        er.contains(r) && (ea.estimate - a).abs() <= ea.half_width && within(elapsed, Duration::from_secs(120)),
        format!(
            "R analytic {r:.6} sim {:.6} [{:.6}, {:.6}]; A analytic {a:.8} sim {:.8} +/- {:.2e}; {elapsed:.2?}",
            er.estimate, er.lower, er.upper, ea.estimate, ea.half_width
        ),
    )
}

struct Calibrated {
    params: RateParams,
}

fn calibrate(d: &Design) -> Result<Calibrated, String> {
    let plan = plan_partitions(&d.dfg, 1).map_err(|e| e.to_string())?;
    let params = RateParams { lambda_voter: 0.0, ..d.cfg.params.clone() };
    let lambda_bit =
        calibrate_lambda_bit(&d.dfg, &d.lib, &plan, &params, ModelKind::ScuOnly, 15.0 * MIN, 0.65, EPS).map_err(|e| e.to_string())?;
    Ok(Calibrated { params: RateParams { lambda_bit, ..params } })
}

fn grid(d: &Design, params: &RateParams, counts: Vec<usize>, taus: Vec<f64>) -> Result<Vec<SweepRow>, String> {
    let cfg = AnalysisConfig {
        models: vec![ModelKind::ScuOnly, ModelKind::Combined],
        partitions: PartitionSpec::Counts(counts),
        scrub_intervals: taus,
        params: params.clone(),
        simulate_trials: 0,
        ..d.cfg.clone()
    };
    run_sweep(&cfg, &d.dfg, &d.lib, 0).map_err(|e| e.to_string())
}

fn value(rows: &[SweepRow], kind: ModelKind, n: usize, tau: f64) -> SweepRow {
    rows.iter()
        .find(|r| r.model == kind && r.partitions == n && r.scrub_interval_s == tau)
        .cloned()
        .expect("grid row")
}

fn figure_trends(d: &Design, cal: &Calibrated) -> Outcome {
    let taus: Vec<f64> = [15.0, 30.0, 60.0, 120.0, 180.0, 240.0].iter().map(|m| m * MIN).collect();
    let counts = vec![1, 2, 4, 8];
    let rows = grid(d, &cal.params, counts.clone(), taus.clone())?;
    let mut ok = true;
    let mut detail = vec![format!("lambda_bit {:.4e}/s", cal.params.lambda_bit)];
    let r1 = value(&rows, ModelKind::ScuOnly, 1, 15.0 * MIN).reliability.unwrap();
    ok &= (r1 - 0.65).abs() <= 0.005;
    detail.push(format!("R(N=1, 15min) {r1:.4}"));
    for kind in [ModelKind::ScuOnly, ModelKind::Combined] {
        for &tau in &taus {
            let rs: Vec<f64> = counts.iter().map(|&n| value(&rows, kind, n, tau).reliability.unwrap()).collect();
            if !rs.windows(2).all(|w| w[1] > w[0]) {
                ok = false;
                detail.push(format!("{kind} tau={tau}s not increasing: {rs:?}"));
            }
        }
        let avail = value(&rows, kind, 1, 15.0 * MIN).availability.unwrap();
        ok &= avail >= 0.999;
        detail.push(format!("{kind} A(N=1, 15min) {avail:.6}"));
    }
    for (n, target) in [(2, 0.81), (4, 0.90), (8, 0.94)] {
        let r = value(&rows, ModelKind::ScuOnly, n, 15.0 * MIN).reliability.unwrap();
        ok &= (r - target).abs() <= 0.05;
        detail.push(format!("R(N={n}) {r:.3} vs {target}"));
    }
    detail.push("strictly increasing in N at every tau for both models".into());
    ensure(ok, detail.join("; "))
}

fn voter_reversal(d: &Design, cal: &Calibrated) -> Outcome {
    let taus: Vec<f64> = [15.0, 30.0, 45.0, 60.0].iter().map(|m| m * MIN).collect();
    let counts = vec![2, 4, 8];
    let params = RateParams { lambda_voter: 5e-3 / HOUR, ..cal.params.clone() };
    let rows = grid(d, &params, counts.clone(), taus.clone())?;
    let mut ok = true;
    let mut detail = Vec::new();
    for (kind, best) in [(ModelKind::ScuOnly, 4), (ModelKind::Combined, 2)] {
        for &tau in &taus {
            let rs: Vec<f64> = counts.iter().map(|&n| value(&rows, kind, n, tau).reliability.unwrap()).collect();
            let argmax = counts[rs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0];
            ok &= argmax == best;
            detail.push(format!(
                "{kind} {}min: N=2 {:.5} N=4 {:.5} N=8 {:.5} best N={argmax} (want {best})",
                tau / MIN,
                rs[0],
                rs[1],
                rs[2]
            ));
        }
    }
    ensure(ok, detail.join("; "))
}

fn recoverability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    let mut ok = true;
    for n in [1, 2, 3, 4, 6, 8] {
        for kind in [ModelKind::ScuOnly, ModelKind::Combined] {
            for mu in [1e-6, 1.0 / 14_400.0, 1.0 / 900.0, 3.0] {
                let rates: Vec<PartitionRates> = (0..n)
                    .map(|_| {
                        let l = 1e-5 * (0.1 + uniform(&mut rng));
                        match kind {
                            ModelKind::ScuOnly => PartitionRates::scu(l),
                            ModelKind::Combined => PartitionRates {
                                lambda_domain: l,
                                lambda_scu: 0.99 * l,
                                beta: 0.01 * l,
                                beta1: 0.01 * l * uniform(&mut rng),
                                voter_included: false,
                            },
                        }
                    })
                    .collect();
                let c = build_model(kind, &rates, mu).map_err(|e| e.to_string())?;
                let stripped = c.without_actions(|a| a.is_scrub());
                ok &= check_scrub_recoverability(&c) && !check_scrub_recoverability(&stripped);
                checked += 1;
            }
        }
    }
    ensure(ok, format!("{checked} models true with scrubbing, false without"))
}

fn reduction(d: &Design) -> Outcome {
    let params = RateParams { alpha_scu: 1.0, alpha_dcu: 0.0, lambda_voter: 0.0, ..d.cfg.params.clone() };
    let mut ok = true;
    for n in [1, 2, 4] {
        let plan = plan_partitions(&d.dfg, n).map_err(|e| e.to_string())?;
        let build = |kind| -> Result<_, String> {
            let (rates, mu) = point_rates(&d.dfg, &d.lib, &plan, &params, kind, HOUR).map_err(|e| e.to_string())?;
            build_model(kind, &rates, mu).map_err(|e| e.to_string())
        };
        ok &= build(ModelKind::ScuOnly)?.rates() == build(ModelKind::Combined)?.rates();
    }
    ensure(ok, "rate matrices identical for N = 1, 2, 4".into())
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("tmrdep-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let config = Path::new(DATA).join("sweep.toml");
    let mut outputs = Vec::new();
    for (i, jobs) in ["1", "0"].into_iter().enumerate() {
        let out = dir.join(format!("run{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_tmrdep"))
            .args(["sweep", "--config", config.to_str().unwrap(), "--jobs", jobs, "--out", out.to_str().unwrap()])
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("sweep exited with {status}"));
        }
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(outputs[0] == outputs[1], format!("{} bytes, runs with 1 and all threads", outputs[0].len()))
}

fn main() -> ExitCode {
    let d = design();
    let cal = calibrate(&d);
    let criteria: Vec<Criterion<'_>> = vec![
        ("state counts", Box::new(|| state_counts(&d))),
        ("closed-form reliability", Box::new(closed_form)),
        ("balance equations", Box::new(balance)),
        ("ODE cross-check", Box::new(ode_cross_check)),
        ("Monte Carlo agreement", Box::new(|| monte_carlo(&d))),
        ("calibrated trends", Box::new(|| figure_trends(&d, cal.as_ref()?))),
        ("voter trend reversal", Box::new(|| voter_reversal(&d, cal.as_ref()?))),
        ("scrub recoverability", Box::new(recoverability)),
        ("reduction identity", Box::new(|| reduction(&d))),
        ("sweep determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
