//! Interprets exported PRISM text with synchronous-product semantics and
//! compares the reachable state space and rate matrix with the composed chain.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use tmrdep::core::{build_model, ModelKind, PartitionRates};
use tmrdep::prism::export_model;

struct Command {
    action: String,
    guard: Option<u8>,
    rate: f64,
    to: u8,
}

struct Model {
    modules: Vec<Vec<Command>>,
    init: Vec<u8>,
}

fn eval(expr: &str, consts: &BTreeMap<String, f64>) -> f64 {
    expr.split('*')
        .map(|f| f.trim().parse().unwrap_or_else(|_| consts[f.trim()]))
        .product()
}

fn parse(text: &str) -> Model {
    let mut consts = BTreeMap::new();
    let mut modules = Vec::new();
    let mut init = Vec::new();
    for line in text.lines().map(str::trim) {
        if let Some(rest) = line.strip_prefix("const double ") {
            let (name, value) = rest.trim_end_matches(';').split_once(" = ").unwrap();
            consts.insert(name.to_string(), value.parse::<f64>().unwrap());
        } else if line.starts_with("module ") {
            modules.push(Vec::new());
        } else if line.contains(": [1..3] init ") {
            init.push(line.trim_end_matches(';').rsplit(' ').next().unwrap().parse().unwrap());
        } else if let Some(rest) = line.strip_prefix('[') {
            let (action, rest) = rest.split_once("] ").unwrap();
            let (guard, rest) = rest.split_once(" -> ").unwrap();
            let (rate, update) = rest.split_once(" : ").unwrap();
            let guard = (guard != "false").then(|| guard.split_once('=').unwrap().1.parse().unwrap());
            let to = if update == "true;" {
                0
            } else {
                update.trim_end_matches(");").rsplit('=').next().unwrap().parse().unwrap()
            };
            modules.last_mut().unwrap().push(Command {
                action: action.to_string(),
                guard,
                rate: eval(rate, &consts),
                to,
            });
        }
    }
    Model { modules, init }
}

fn successors(m: &Model, s: &[u8]) -> Vec<(Vec<u8>, f64)> {
    let alphabets: Vec<BTreeSet<&str>> =
        m.modules.iter().map(|cmds| cmds.iter().map(|c| c.action.as_str()).collect()).collect();
    let actions: BTreeSet<&str> = alphabets.iter().flatten().copied().collect();
    let mut out = Vec::new();
    for a in actions {
        // Partial products over participating modules.
        let mut partial: Vec<(Vec<u8>, f64)> = vec![(s.to_vec(), 1.0)];
        for (i, cmds) in m.modules.iter().enumerate() {
            if !alphabets[i].contains(a) {
                continue;
            }
            let enabled: Vec<&Command> =
                cmds.iter().filter(|c| c.action == a && c.guard == Some(s[i])).collect();
            partial = partial
                .iter()
                .flat_map(|(t, r)| {
                    enabled.iter().map(move |c| {
                        let mut t = t.clone();
                        t[i] = c.to;
                        (t, r * c.rate)
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

fn index(s: &[u8]) -> usize {
    s.iter().fold(0, |acc, &v| acc * 3 + usize::from(v - 1))
}

fn check(kind: ModelKind, rates: &[PartitionRates], mu: f64) {
    let text = export_model(kind, rates, mu).unwrap();
    assert_eq!(text, export_model(kind, rates, mu).unwrap());
    let m = parse(&text);
    let c = build_model(kind, rates, mu).unwrap();
    let n = c.len();
    let mut dense = vec![vec![0.0; n]; n];
    let mut seen = BTreeSet::from([m.init.clone()]);
    let mut queue = VecDeque::from([m.init.clone()]);
    assert_eq!(index(&m.init), c.initial_state());
    while let Some(s) = queue.pop_front() {
        for (t, r) in successors(&m, &s) {
            dense[index(&s)][index(&t)] += r;
            if seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    assert_eq!(seen.len(), n, "{kind} N={}", rates.len());
    for (i, row) in dense.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            let got = c.rates().get(i, j);
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300), "{kind} {i}->{j}: {got} vs {want}");
        }
    }
}

fn combined(l: f64, b: f64, b1: f64) -> PartitionRates {
    PartitionRates {
        lambda_domain: l + b,
        lambda_scu: l,
        beta: b,
        beta1: b1,
        voter_included: false,
    }
}

#[test]
fn exported_models_match_composition() {
    for n in 1..=4 {
        let scu: Vec<_> = (0..n).map(|i| PartitionRates::scu(1e-4 * (i + 1) as f64)).collect();
        check(ModelKind::ScuOnly, &scu, 1.0 / 900.0);
        let comb: Vec<_> = (0..n).map(|i| combined(1e-4 * (i + 1) as f64, 2e-6, 3e-6 * (i + 1) as f64)).collect();
        check(ModelKind::Combined, &comb, 1.0 / 3600.0);
    }
    check(ModelKind::Combined, &[combined(1e-4, 0.0, 0.0), combined(2e-4, 0.0, 0.0)], 1e-3);
}

#[test]
fn single_partition_text() {
    let text = export_model(ModelKind::ScuOnly, &[PartitionRates::scu(0.25)], 0.5).unwrap();
    assert!(text.contains("\nctmc\n"));
    assert!(text.contains("const double mu = 0.5;"));
    assert!(text.contains("const double lambda1 = 0.25;"));
    assert!(text.contains("s1 : [1..3] init 3;"));
    assert!(text.contains("s1=3 -> 3*lambda1 : (s1'=2);"));
    assert!(text.contains("s1=2 -> 2*lambda1 : (s1'=1);"));
    assert!(text.contains("label \"up\" = s1>=2;"));
}

#[test]
fn two_partition_combined_has_cross_actions() {
    let text = export_model(ModelKind::Combined, &[combined(1e-4, 1e-6, 2e-6); 2], 1e-3).unwrap();
    assert!(text.contains("const double beta1_2 = "));
    let cross: Vec<&str> = text.lines().filter(|l| l.contains("[dcu_")).collect();
    assert!(!cross.is_empty());
    assert!(text.contains("label \"down\" = s1=1 | s2=1;"));
}
