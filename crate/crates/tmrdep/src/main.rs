use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tmrdep::config::{parse_model_kind, AnalysisConfig, PartitionSpec};
use tmrdep::core::{build_model, ComponentLibrary, ComposedCtmc, Dfg, ModelKind, PartitionPlan};
use tmrdep::dfg_file::parse_dfg;
use tmrdep::library::parse_library;
use tmrdep::property::{evaluate, parse_property, PropertyValue};
use tmrdep::sweep::{emit_csv, format_sig12, plans, point_rates, run_sweep, simulate_parallel, with_jobs};
use tmrdep::units::parse_duration;
use tmrdep::{Error, Result};

const EXIT_INPUT: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VIOLATED: u8 = 3;

#[derive(Parser)]
#[command(name = "tmrdep", version, about = "Dependability analysis of partitioned TMR with configuration scrubbing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Inputs {
    /// DFG file (JSON).
    #[arg(long)]
    dfg: Option<PathBuf>,
    /// Characterization library (CSV `kind,critical_bits`).
    #[arg(long, env = "TMRDEP_LIBRARY")]
    library: Option<PathBuf>,
    /// Analysis config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model kinds, comma separated: scu, combined.
    #[arg(long, value_delimiter = ',', value_parser = model_kind)]
    model: Vec<ModelKind>,
    /// Partition counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    partitions: Vec<usize>,
    /// Scrub intervals such as 15min or 4h, comma separated.
    #[arg(long, value_delimiter = ',')]
    scrub: Vec<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn model_kind(s: &str) -> std::result::Result<ModelKind, String> {
    parse_model_kind(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one design point.
    Analyze {
        #[command(flatten)]
        inputs: Inputs,
        /// Property query to evaluate; repeatable.
        #[arg(long)]
        property: Vec<String>,
    },
    /// Run the model x partitions x scrub-interval grid and write CSV.
    Sweep {
        #[command(flatten)]
        inputs: Inputs,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Write the PRISM model of one design point.
    ExportPrism {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Monte Carlo estimate for one design point.
    Simulate {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Check a boolean property; exit code 3 when it fails.
    Check {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value = "filter(forall, P>0 [X operational])")]
        property: String,
    },
}

struct Loaded {
    cfg: AnalysisConfig,
    dfg: Dfg,
    lib: ComponentLibrary,
}

fn load(inputs: &Inputs) -> Result<Loaded> {
    let mut cfg = match &inputs.config {
        Some(p) => AnalysisConfig::load(p)?,
        None => AnalysisConfig::default(),
    };
    if !inputs.model.is_empty() {
        cfg.models = inputs.model.clone();
    }
    if !inputs.partitions.is_empty() {
        cfg.partitions = PartitionSpec::Counts(inputs.partitions.clone());
    }
    if !inputs.scrub.is_empty() {
        cfg.scrub_intervals = inputs
            .scrub
            .iter()
            .map(|s| parse_duration(s).map_err(|e| Error::Config(format!("--scrub: {e}"))))
            .collect::<Result<_>>()?;
    }
    cfg.validate()?;
    let lib_path = inputs
        .library
        .clone()
        .or_else(|| cfg.library.clone())
        .ok_or_else(|| Error::Config("no library: pass --library or set TMRDEP_LIBRARY".into()))?;
    let dfg_path = inputs
        .dfg
        .clone()
        .or_else(|| cfg.dfg.clone())
        .ok_or_else(|| Error::Config("no DFG: pass --dfg or set `dfg` in the config".into()))?;
    let lib = parse_library(&read(&lib_path)?)
        .map_err(|e| Error::Library(format!("{}: {e}", lib_path.display())))?;
    let dfg = parse_dfg(&read(&dfg_path)?, Some(&lib)).map_err(|e| match e {
        Error::DfgSyntax { .. } | Error::EmptyDfg | Error::InvalidDfg(_) => {
            Error::InvalidDfg(format!("{}: {e}", dfg_path.display()))
        }
        other => other,
    })?;
    Ok(Loaded { cfg, dfg, lib })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The single design point of a non-sweep command.
struct Single {
    kind: ModelKind,
    plan: PartitionPlan,
    tau: f64,
}

fn single(l: &Loaded, command: &str) -> Result<Single> {
    let plans = plans(&l.cfg, &l.dfg)?;
    let counts = (l.cfg.models.len(), plans.len(), l.cfg.scrub_intervals.len());
    if counts != (1, 1, 1) {
        return Err(Error::Config(format!(
            "{command} needs one model, one partition count and one scrub interval; got {}, {} and {}",
            counts.0, counts.1, counts.2
        )));
    }
    Ok(Single {
        kind: l.cfg.models[0],
        plan: plans.into_iter().next().expect("one plan"),
        tau: l.cfg.scrub_intervals[0],
    })
}

fn chain(l: &Loaded, s: &Single) -> Result<ComposedCtmc> {
    let (rates, mu) = point_rates(&l.dfg, &l.lib, &s.plan, &l.cfg.params, s.kind, s.tau)?;
    Ok(build_model(s.kind, &rates, mu)?)
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Evaluates queries; returns the report and whether every boolean held.
fn properties(l: &Loaded, c: &ComposedCtmc, queries: &[String]) -> Result<(String, bool)> {
    let mut report = String::new();
    let mut all_hold = true;
    for q in queries {
        let query = parse_property(q)?;
        let value = evaluate(&query, c, l.cfg.params.mission_time, l.cfg.epsilon)?;
        if value == PropertyValue::Boolean(false) {
            all_hold = false;
        }
        let shown = match value {
            PropertyValue::Probability(p) => format_sig12(p),
            PropertyValue::Boolean(b) => b.to_string(),
        };
        report.push_str(&format!("{query} = {shown}\n"));
    }
    Ok((report, all_hold))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze { inputs, property } => {
            let l = load(&inputs)?;
            let s = single(&l, "analyze")?;
            if property.is_empty() {
                let cfg = AnalysisConfig {
                    simulate_trials: 0,
                    ..l.cfg.clone()
                };
                let rows = run_sweep(&cfg, &l.dfg, &l.lib, 1)?;
                write_out(&inputs.out, &emit_csv(&rows))?;
                Ok(0)
            } else {
                let c = chain(&l, &s)?;
                let (report, ok) = properties(&l, &c, &property)?;
                write_out(&inputs.out, &report)?;
                Ok(if ok { 0 } else { EXIT_VIOLATED })
            }
        }
        Command::Sweep { inputs, jobs } => {
            let l = load(&inputs)?;
            let rows = run_sweep(&l.cfg, &l.dfg, &l.lib, jobs)?;
            write_out(&inputs.out, &emit_csv(&rows))?;
            Ok(0)
        }
        Command::ExportPrism { inputs } => {
            let l = load(&inputs)?;
            let s = single(&l, "export-prism")?;
            let (rates, mu) = point_rates(&l.dfg, &l.lib, &s.plan, &l.cfg.params, s.kind, s.tau)?;
            write_out(&inputs.out, &tmrdep::prism::export_model(s.kind, &rates, mu)?)?;
            Ok(0)
        }
        Command::Simulate {
            inputs,
            trials,
            seed,
            jobs,
        } => {
            let l = load(&inputs)?;
            let s = single(&l, "simulate")?;
            let c = chain(&l, &s)?;
            let trials = trials.unwrap_or(if l.cfg.simulate_trials > 0 {
                l.cfg.simulate_trials
            } else {
                100_000
            });
            if trials == 0 {
                return Err(Error::Config("--trials must be at least 1".into()));
            }
            let seed = seed.unwrap_or(l.cfg.seed);
            let t = l.cfg.params.mission_time;
            let (rel, avail) = with_jobs(jobs, || simulate_parallel(&c, t, trials, seed));
            let mut text = String::from("metric,estimate,half_width_99,lower,upper,trials,seed\n");
            for (name, e) in [("reliability", rel), ("availability", avail)] {
                text.push_str(&format!(
                    "{name},{},{},{},{},{},{}\n",
                    format_sig12(e.estimate),
                    format_sig12(e.half_width),
                    format_sig12(e.lower),
                    format_sig12(e.upper),
                    e.trials,
                    e.seed
                ));
            }
            write_out(&inputs.out, &text)?;
            Ok(0)
        }
        Command::Check { inputs, property } => {
            let l = load(&inputs)?;
            let s = single(&l, "check")?;
            let query = parse_property(&property)?;
            let c = chain(&l, &s)?;
            match evaluate(&query, &c, l.cfg.params.mission_time, l.cfg.epsilon)? {
                PropertyValue::Boolean(b) => {
                    write_out(&inputs.out, &format!("{query} = {b}\n"))?;
                    Ok(if b { 0 } else { EXIT_VIOLATED })
                }
                PropertyValue::Probability(_) => Err(Error::Config(format!(
                    "check needs a boolean property; `{query}` is quantitative"
                ))),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT })
        }
    }
}
