//! The Monte Carlo acceptance model: 99% intervals cover the analytic values
//! in at least 99 of 100 seeds at a reduced trial count.

use std::path::Path;

use tmrdep::config::AnalysisConfig;
use tmrdep::core::engine::{availability, reliability};
use tmrdep::core::partition::plan_partitions;
use tmrdep::core::{build_model, ModelKind, HOUR};
use tmrdep::dfg_file::parse_dfg;
use tmrdep::library::parse_library;
use tmrdep::sweep::{point_rates, simulate_parallel};

#[test]
fn two_partition_combined_fir8_coverage() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let cfg = AnalysisConfig::load(&data.join("sweep.toml")).unwrap();
    let lib = parse_library(&std::fs::read_to_string(data.join("library.csv")).unwrap()).unwrap();
    let dfg = parse_dfg(&std::fs::read_to_string(data.join("fir8.json")).unwrap(), Some(&lib)).unwrap();
    let plan = plan_partitions(&dfg, 2).unwrap();
    let (rates, mu) = point_rates(&dfg, &lib, &plan, &cfg.params, ModelKind::Combined, HOUR).unwrap();
    let c = build_model(ModelKind::Combined, &rates, mu).unwrap();
    let t = cfg.params.mission_time;
    let r = reliability(&c, t, 1e-12).unwrap();
    let a = availability(&c, t, 1e-12).unwrap();
    let (mut hit_r, mut hit_a) = (0, 0);
    for seed in 0..100 {
        let (er, ea) = simulate_parallel(&c, t, 20_000, seed);
        hit_r += usize::from(er.contains(r));
        hit_a += usize::from((ea.estimate - a).abs() <= ea.half_width);
    }
    assert!(hit_r >= 99 && hit_a >= 99, "reliability {hit_r}/100, availability {hit_a}/100");
}
