//! JSON data-flow graph files:
//!
//! ```json
//! { "nodes": [{"id": "m0", "kind": "multiplier"}], "edges": [["m0", "a1"]] }
//! ```

use serde::{Deserialize, Serialize};
use tmrdep_core::model::Invariant;
use tmrdep_core::{ComponentLibrary, Dfg, DfgNode};

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    id: String,
    kind: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DfgFile {
    nodes: Vec<NodeEntry>,
    #[serde(default)]
    edges: Vec<(String, String)>,
}

/// Parses and validates a DFG. With `lib`, every node kind must be in it.
pub fn parse_dfg(text: &str, lib: Option<&ComponentLibrary>) -> Result<Dfg> {
    let file: DfgFile = serde_json::from_str(text).map_err(|e| Error::DfgSyntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.nodes.is_empty() {
        return Err(Error::EmptyDfg);
    }
    let dfg = Dfg::new(
        file.nodes.into_iter().map(|n| DfgNode::new(n.id, n.kind)).collect(),
        file.edges,
    );
    let mut violations = dfg.validate();
    if let Some(lib) = lib {
        violations.extend(lib.validate_for(&dfg));
    }
    if violations.is_empty() {
        Ok(dfg)
    } else {
        let cycle = violations.iter().any(|v| v.invariant == Invariant::Cycle);
        let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
        let prefix = if cycle { "cyclic graph; " } else { "" };
        Err(Error::InvalidDfg(format!("{prefix}{}", text.join("; "))))
    }
}

/// Serializes a DFG in the format read by [`parse_dfg`].
pub fn write_dfg(dfg: &Dfg) -> String {
    let file = DfgFile {
        nodes: dfg
            .nodes()
            .iter()
            .map(|n| NodeEntry {
                id: n.id.clone(),
                kind: n.kind.clone(),
            })
            .collect(),
        edges: dfg.edges().to_vec(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("plain data serializes");
    out.push('\n');
    out
}

/// Direct-form FIR filter with `taps` multipliers and `taps - 1` adders,
/// listed tap by tap: `m0, m1, a1, m2, a2, ...`.
///
/// # Panics
/// If `taps == 0`.
pub fn fir_filter(taps: usize) -> Dfg {
    assert!(taps > 0, "an FIR filter needs at least one tap");
    let mut nodes = vec![DfgNode::new("m0", "multiplier")];
    let mut edges = Vec::new();
    for i in 1..taps {
        nodes.push(DfgNode::new(format!("m{i}"), "multiplier"));
        nodes.push(DfgNode::new(format!("a{i}"), "adder"));
        let acc = if i == 1 { "m0".to_string() } else { format!("a{}", i - 1) };
        edges.push((acc, format!("a{i}")));
        edges.push((format!("m{i}"), format!("a{i}")));
    }
    Dfg::new(nodes, edges)
}
