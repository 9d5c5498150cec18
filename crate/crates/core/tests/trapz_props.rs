mod common;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use chiquad::mori::{psi, solve_window};
use chiquad::scenario::{t_interval_integrand, ScenarioSpec};
use chiquad::trapz::*;
use common::nu;
use proptest::prelude::*;

fn counting(calls: &Arc<AtomicUsize>) -> Integrand {
    let calls = Arc::clone(calls);
    Integrand::new(
        move |x| {
            calls.fetch_add(1, Ordering::Relaxed);
            (-x).exp()
        },
        1.0,
    )
    .unwrap()
}

#[test]
fn simple_budget_of_65_costs_65_calls() {
    let calls = Arc::new(AtomicUsize::new(0));
    let r = simple_procedure_to(nu(1), &counting(&calls), 1e-17, 65).unwrap();
    assert_eq!(calls.load(Ordering::Relaxed), 65);
    assert_eq!(r.evaluations, 65);
    let counts: Vec<usize> = r.history.iter().map(|it| it.evaluations).collect();
    assert_eq!(counts, [5, 9, 17, 33, 65]);
}

#[test]
fn finite_sum_is_within_trimming_bound_of_infinite_sum() {
    for n in [1, 2, 5, 10] {
        let w = solve_window(nu(n), 1e-10).unwrap();
        let h = w.d / 32.0;
        let a = Integrand::constant(1.0);
        let finite = trapezoid_sum(nu(n), &a, GridSpec::new(w.y_lo, h, 33).unwrap()).unwrap();
        let wide = trapezoid_sum(nu(n), &a, GridSpec::new(w.y_lo - 20.0, h, 33 + 1280).unwrap()).unwrap();
        assert!((wide - finite).abs() <= w.bound + 1e-15, "nu = {n}");
        // the infinite sum of an analytic density is 1 to rounding
        assert!((wide - 1.0).abs() < 1e-14);
        assert!(psi(nu(n), w.y_lo - 20.0) == 0.0 || psi(nu(n), w.y_lo - 20.0) < 1e-300);
    }
}

#[test]
fn exponential_node_counts_and_nesting() {
    let (y0, h0, n0) = (-1.3, 0.4, 4);
    for k in 1..=8 {
        let old = exponential_grid(y0, h0, n0, k - 1);
        let new = exponential_grid(y0, h0, n0, k);
        assert_eq!(new.n, (n0 + 2 * k as usize) << k);
        let offset = 1usize << k;
        for i in 0..old.n {
            let (a, b) = (old.node(i), new.node(offset + 2 * i));
            assert!((a - b).abs() <= 1e-13, "k = {k}, i = {i}");
        }
    }
}

#[test]
fn exponential_converges_fast_on_known_answer() {
    for n in [1, 2, 5] {
        let spec = ScenarioSpec::new(nu(n), 0.05).unwrap();
        let r = exponential_procedure(nu(n), &t_interval_integrand(&spec), 4, EXPONENTIAL_INITIAL_TARGET, 6).unwrap();
        let diag = convergence_diagnostic(&r, 0.95);
        let first_good = diag.iter().position(|&(_, e)| e <= -13.0).expect("reaches 1e-13");
        for pair in diag[..=first_good].windows(2) {
            assert!(pair[1].1 < pair[0].1, "nu = {n}: {diag:?}");
        }
        assert!(diag[first_good..].iter().all(|&(_, e)| e <= -13.0));
        for (k, it) in r.history.iter().enumerate() {
            assert_eq!(it.n, (4 + 2 * k) << k);
        }
    }
}

#[test]
fn adaptive_run_meets_its_tolerance() {
    for n in [1, 2, 3, 10, 100] {
        let spec = ScenarioSpec::new(nu(n), 0.05).unwrap();
        let r = simple_procedure(nu(n), &t_interval_integrand(&spec), 1e-12, 4097).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.95).abs() <= 1e-12, "nu = {n}: {:e}", r.value - 0.95);
        assert!(r.history.len() >= 3);
    }
}

#[test]
fn bound_violation_is_reported() {
    let a = Integrand::new(|x| 2.0 * x, 1.0).unwrap();
    assert!(simple_procedure_to(nu(2), &a, 1e-10, 9).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn runs_are_bitwise_deterministic(n in 1u32..=200, alpha in 0.01f64..0.3) {
        let spec = ScenarioSpec::new(nu(n), alpha).unwrap();
        let a = t_interval_integrand(&spec);
        let r1 = simple_procedure_to(nu(n), &a, 1e-17, 33).unwrap();
        let r2 = simple_procedure_to(nu(n), &a, 1e-17, 33).unwrap();
        prop_assert_eq!(r1.value.to_bits(), r2.value.to_bits());
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn exponential_grids_nest(y0 in -3.0f64..0.0, h0 in 0.05f64..1.0, n0 in 2usize..10, k in 1u32..6) {
        let old = exponential_grid(y0, h0, n0, k - 1);
        let new = exponential_grid(y0, h0, n0, k);
        prop_assert_eq!(new.n, (n0 + 2 * k as usize) << k);
        for i in 0..old.n {
            prop_assert!((old.node(i) - new.node((1 << k) + 2 * i)).abs() <= 1e-12);
        }
    }
}
