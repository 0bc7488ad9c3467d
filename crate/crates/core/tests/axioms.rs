mod common;

use common::run_suite;
use lp_logic::eval::{Check, EvalOptions};
use lp_logic::par::Parallelism;

fn opts(parallelism: Parallelism) -> EvalOptions {
    EvalOptions { parallelism, ..EvalOptions::default() }
}

#[test]
fn hundred_models_satisfy_every_axiom() {
    let report = run_suite(0, 100, 20, opts(Parallelism::Parallel), false);
    assert!(report.passed(), "{:?}", report.failures.first());
    for c in Check::ALL {
        assert!(report.tallies[&c].pass > 0, "{} never exercised", c.name());
    }
}

#[test]
fn runs_repeat_exactly_in_both_modes() {
    let a = run_suite(5, 12, 8, opts(Parallelism::Parallel), false);
    let b = run_suite(5, 12, 8, opts(Parallelism::Parallel), false);
    let c = run_suite(5, 12, 8, opts(Parallelism::Sequential), false);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn broken_measure_is_caught() {
    let report = run_suite(0, 6, 6, opts(Parallelism::Parallel), true);
    assert!(!report.passed());
    assert!(report.failures.iter().any(|f| f.check == Check::Tautology));
}
