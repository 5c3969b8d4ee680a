//! PRISM `ctmc` export.
//!
//! One module per partition with a local variable `s<i> : [1..3] init 3`.
//! Partition-local actions carry the partition number (`p1_scu1`) so they
//! interleave; `perform_scrub` and the `dcu_<i>_<j>` labels are shared.
//! Actions whose rate is zero are kept in the alphabet with a `false` guard,
//! otherwise PRISM would let the partner module fire them alone.

use std::fmt::Write;

use tmrdep_core::builder::{build_partitions, SyncSpec};
use tmrdep_core::{Action, CtmcModule, LocalState, ModelKind, PartitionRates};

use crate::error::Result;

/// PRISM text for the model built from `rates` with scrub rate `mu`.
pub fn export_model(kind: ModelKind, rates: &[PartitionRates], mu: f64) -> Result<String> {
    let (modules, sync) = build_partitions(kind, rates, mu)?;
    Ok(export_prism(&modules, &sync, rates, mu))
}

fn rate_expr(module: &CtmcModule, sync: &SyncSpec, action: Action, from: LocalState) -> String {
    let p = module.partition + 1;
    let k = from.value();
    match action {
        Action::Scu1(_) | Action::Scu2(_) => format!("{k}*lambda{p}"),
        Action::Dcu1(_) | Action::Dcu2(_) => format!("{k}*beta{p}"),
        Action::PerformScrub if module.partition == sync.scrub_master => "mu".into(),
        Action::CrossDcu { origin, .. } if origin == module.partition => format!("{k}*beta1_{p}"),
        Action::PerformScrub | Action::CrossDcu { .. } => "1".into(),
    }
}

/// Deterministic PRISM text for synchronized partition modules.
pub fn export_prism(modules: &[CtmcModule], sync: &SyncSpec, rates: &[PartitionRates], mu: f64) -> String {
    let kind = modules.first().map_or(ModelKind::ScuOnly, |m| m.kind);
    let mut out = String::new();
    let _ = writeln!(out, "// Partitioned TMR with blind scrubbing: {kind} model, {} partitions.", modules.len());
    out.push_str("ctmc\n\n");
    let _ = writeln!(out, "const double mu = {mu:?};");
    for (i, r) in rates.iter().enumerate() {
        let p = i + 1;
        let _ = writeln!(out, "const double lambda{p} = {:?};", r.lambda_scu);
        if kind == ModelKind::Combined {
            let _ = writeln!(out, "const double beta{p} = {:?};", r.beta);
            let _ = writeln!(out, "const double beta1_{p} = {:?};", r.beta1);
        }
    }
    for m in modules {
        let p = m.partition + 1;
        let _ = writeln!(out, "\nmodule p{p}");
        let _ = writeln!(out, "  s{p} : [1..3] init {};", CtmcModule::INITIAL.value());
        for t in &m.transitions {
            let _ = writeln!(
                out,
                "  [{}] s{p}={} -> {} : (s{p}'={});",
                t.action,
                t.from.value(),
                rate_expr(m, sync, t.action, t.from),
                t.to.value()
            );
        }
        for a in &m.alphabet {
            if !m.transitions.iter().any(|t| t.action == *a) {
                let _ = writeln!(out, "  [{a}] false -> 1 : true;");
            }
        }
        out.push_str("endmodule\n");
    }
    let all = |op: &str, v: u8, join: &str| {
        (1..=modules.len())
            .map(|p| format!("s{p}{op}{v}"))
            .collect::<Vec<_>>()
            .join(join)
    };
    out.push('\n');
    let _ = writeln!(out, "label \"up\" = {};", all(">=", 2, " & "));
    let _ = writeln!(out, "label \"operational\" = {};", all("=", 3, " & "));
    let _ = writeln!(out, "label \"down\" = {};", all("=", 1, " | "));
    out
}
