use tmrdep_core::engine::{availability, globally, reliability, steady_state, transient};
use tmrdep_core::{build_model, ComposedCtmc, ModelKind, PartitionRates};

fn combined(lambda: f64, beta: f64) -> PartitionRates {
    PartitionRates {
        lambda_domain: lambda + beta,
        lambda_scu: lambda,
        beta,
        beta1: beta,
        voter_included: false,
    }
}

fn chain(kind: ModelKind, n: usize, mu: f64) -> ComposedCtmc {
    let rates: Vec<_> = (0..n)
        .map(|i| {
            let l = 0.05 * (1.0 + i as f64);
            match kind {
                ModelKind::ScuOnly => PartitionRates::scu(l),
                ModelKind::Combined => combined(0.99 * l, 0.01 * l),
            }
        })
        .collect();
    build_model(kind, &rates, mu).unwrap()
}

#[test]
fn faster_scrub_never_hurts() {
    let mus = [0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0];
    for kind in [ModelKind::ScuOnly, ModelKind::Combined] {
        for n in [1, 2, 3] {
            let mut last = (0.0, 0.0);
            for &mu in &mus {
                let c = chain(kind, n, mu);
                let r = reliability(&c, 20.0, 1e-12).unwrap();
                let a = availability(&c, 20.0, 1e-12).unwrap();
                assert!(r >= last.0 - 1e-10 && a >= last.1 - 1e-10, "{kind} N={n} mu={mu}");
                last = (r, a);
            }
        }
    }
}

#[test]
fn steady_state_is_the_long_run_transient() {
    for kind in [ModelKind::ScuOnly, ModelKind::Combined] {
        for n in [1, 2, 3] {
            let c = chain(kind, n, 0.7);
            let pi = steady_state(c.rates()).unwrap();
            let min_rate = c
                .rates()
                .exit_rates()
                .into_iter()
                .filter(|&r| r > 0.0)
                .fold(f64::INFINITY, f64::min);
            let t = 1e3 / min_rate;
            let p = transient(c.rates(), t, &c.initial_distribution(), 1e-12).unwrap();
            for (a, b) in pi.iter().zip(&p.distribution) {
                assert!((a - b).abs() <= 1e-6, "{kind} N={n}");
            }
        }
    }
}

#[test]
fn absorbing_chain_reliability_is_plain_up_mass() {
    for kind in [ModelKind::ScuOnly, ModelKind::Combined] {
        let c = chain(kind, 2, 0.5);
        let up = c.up_mask();
        let down: Vec<bool> = up.iter().map(|u| !u).collect();
        let absorbed = c.rates().make_absorbing(&down);
        let init = c.initial_distribution();
        let r = globally(&absorbed, &init, &up, 15.0, 1e-12).unwrap();
        let p = transient(&absorbed, 15.0, &init, 1e-12).unwrap();
        let mass: f64 = p.distribution.iter().zip(&up).filter(|(_, &u)| u).map(|(x, _)| x).sum();
        assert_eq!(r, mass.clamp(0.0, 1.0));
    }
}

#[test]
fn availability_dominates_reliability_and_both_shrink_with_time() {
    let c = chain(ModelKind::Combined, 3, 1.0);
    let mut last = 1.0;
    for t in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let r = reliability(&c, t, 1e-12).unwrap();
        assert!(r <= last + 1e-12);
        assert!(availability(&c, t, 1e-12).unwrap() >= r);
        last = r;
    }
}
