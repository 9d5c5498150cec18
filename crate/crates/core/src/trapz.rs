//! Trapezoidal sums on the Mori-transformed integral and the two nested
//! refinement procedures built on them.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mori::{solve_window, transform, trimming_bound, trimming_target, TransformedWeight};
use crate::specfun::DegreesOfFreedom;
use crate::sum::CompensatedSum;
use crate::ERROR_FLOOR;

/// First node count of the simple procedure.
pub const SIMPLE_INITIAL_NODES: usize = 5;
/// Default trimming target for the first window of the exponential procedure.
pub const EXPONENTIAL_INITIAL_TARGET: f64 = 1e-6;

type EvalFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A bounded function `a` on `(0, inf)` whose expectation is computed.
#[derive(Clone)]
pub struct Integrand {
    f: Arc<EvalFn>,
    bound: f64,
}

impl Integrand {
    /// Wraps `f`, promising `|f(x)| <= bound` for every `x > 0`.
    pub fn new<F>(f: F, bound: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(Error::Domain { what: "integrand bound", value: bound });
        }
        Ok(Self { f: Arc::new(f), bound })
    }

    /// The constant function `c`.
    pub fn constant(c: f64) -> Self {
        let bound = if c == 0.0 { 1.0 } else { c.abs() };
        Self { f: Arc::new(move |_| c), bound }
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// `a(x)`, checked against the declared bound.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = (self.f)(x);
        if !(v.abs() <= self.bound) {
            return Err(Error::BoundViolation { x, value: v, bound: self.bound });
        }
        Ok(v)
    }
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand").field("bound", &self.bound).finish_non_exhaustive()
    }
}

/// Equally spaced nodes `y_lo + h j`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub y_lo: f64,
    pub h: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(y_lo: f64, h: f64, n: usize) -> Result<Self> {
        if !y_lo.is_finite() || !(h > 0.0) || !h.is_finite() || n == 0 {
            return Err(Error::InvalidGrid(format!("y_lo = {y_lo}, h = {h}, n = {n}")));
        }
        Ok(Self { y_lo, h, n })
    }

    pub fn node(&self, j: usize) -> f64 {
        self.y_lo + self.h * j as f64
    }

    /// Distance from the first to the last node.
    pub fn span(&self) -> f64 {
        self.h * (self.n - 1) as f64
    }
}

/// One refinement step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Iteration {
    pub n: usize,
    pub h: f64,
    pub value: f64,
    /// Cumulative integrand evaluations after this step.
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Total calls of the integrand over all iterations.
    pub evaluations: usize,
    pub history: Vec<Iteration>,
    /// `|A_k - A_{k-1}|` for the last two iterations.
    pub est_discretization_error: f64,
    /// Trimming bound of the final grid.
    pub trimming_bound: f64,
    pub converged: bool,
}

impl QuadratureResult {
    /// Discretization estimate plus trimming bound plus rounding allowance.
    pub fn error_bound(&self) -> f64 {
        self.est_discretization_error + self.trimming_bound + rounding_allowance(self.value)
    }
}

/// `g(y) = a(x(y)) psi(y)`, skipping the call to `a` where `psi` is zero.
fn weighted_value(w: &TransformedWeight, a: &Integrand, y: f64, calls: &mut usize) -> Result<f64> {
    let p = w.psi(y);
    if p == 0.0 {
        return Ok(0.0);
    }
    *calls += 1;
    Ok(a.eval(transform(y).x)? * p)
}

fn weighted_sum(h: f64, g: &[f64]) -> f64 {
    h * g.iter().copied().collect::<CompensatedSum>().value()
}

/// `h sum_j a(x(y_j)) psi_nu(y_j)` over the grid, in index order.
pub fn trapezoid_sum(nu: DegreesOfFreedom, a: &Integrand, grid: GridSpec) -> Result<f64> {
    let w = TransformedWeight::new(nu);
    let mut calls = 0;
    let g = (0..grid.n)
        .map(|j| weighted_value(&w, a, grid.node(j), &mut calls))
        .collect::<Result<Vec<_>>>()?;
    Ok(weighted_sum(grid.h, &g))
}

fn successive_difference(history: &[Iteration]) -> f64 {
    match history {
        [.., prev, last] => (last.value - prev.value).abs(),
        _ => f64::INFINITY,
    }
}

/// `4 * 2^-53 * max(1, |value|)`: differences below this are rounding.
pub fn rounding_allowance(value: f64) -> f64 {
    4.0 * ERROR_FLOOR * value.abs().max(1.0)
}

fn stop_rule_met(history: &[Iteration], epsilon: f64) -> bool {
    let Some(last) = history.last() else { return false };
    let floor = rounding_allowance(last.value);
    history.len() >= 3 && successive_difference(history) <= epsilon.max(floor)
}

enum Stop {
    Adaptive { n_max: usize },
    Fixed { n: usize },
}

fn simple_run(nu: DegreesOfFreedom, a: &Integrand, epsilon: f64, stop: Stop) -> Result<QuadratureResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain { what: "epsilon", value: epsilon });
    }
    let window = solve_window(nu, trimming_target(epsilon))?;
    let w = TransformedWeight::new(nu);

    let mut n = SIMPLE_INITIAL_NODES;
    let mut h = window.d / (n - 1) as f64;
    let mut calls = 0;
    let mut g = (0..n)
        .map(|j| weighted_value(&w, a, window.y_lo + h * j as f64, &mut calls))
        .collect::<Result<Vec<_>>>()?;
    let mut history = vec![Iteration { n, h, value: weighted_sum(h, &g), evaluations: calls }];

    let converged = loop {
        match stop {
            Stop::Adaptive { n_max } => {
                if stop_rule_met(&history, epsilon) {
                    break true;
                }
                if 2 * n - 1 > n_max {
                    break false;
                }
            }
            Stop::Fixed { n: last } => {
                if n >= last {
                    break true;
                }
            }
        }
        let n_new = 2 * n - 1;
        let h_new = window.d / (n_new - 1) as f64;
        let mut refined = Vec::with_capacity(n_new);
        for (i, &old) in g.iter().enumerate() {
            refined.push(old);
            if i + 1 < n {
                let y = window.y_lo + h_new * (2 * i + 1) as f64;
                refined.push(weighted_value(&w, a, y, &mut calls)?);
            }
        }
        g = refined;
        n = n_new;
        h = h_new;
        history.push(Iteration { n, h, value: weighted_sum(h, &g), evaluations: calls });
    };

    Ok(QuadratureResult {
        value: history.last().map_or(0.0, |it| it.value),
        evaluations: calls,
        est_discretization_error: successive_difference(&history),
        history,
        trimming_bound: window.bound,
        converged,
    })
}

/// Nested halving from 5 nodes on the window whose trimming bound is
/// `trimming_target(epsilon)`. Grids include both window ends, so node counts run
/// 5, 9, 17, 33, 65, ... and every old node is reused.
///
/// Stops once an iteration beyond the third changes the value by at most
/// `max(epsilon, 4 * 2^-53 * max(1, |A|))`, or reports `converged = false`
/// when the next grid would exceed `n_max` nodes.
pub fn simple_procedure(
    nu: DegreesOfFreedom,
    a: &Integrand,
    epsilon: f64,
    n_max: usize,
) -> Result<QuadratureResult> {
    if n_max < SIMPLE_INITIAL_NODES {
        return Err(Error::InvalidGrid(format!("n_max = {n_max} is below {SIMPLE_INITIAL_NODES}")));
    }
    simple_run(nu, a, epsilon, Stop::Adaptive { n_max })
}

/// The simple procedure run to exactly `n` nodes, ignoring the stopping
/// rule. `n` must be one of 5, 9, 17, 33, 65, ...
pub fn simple_procedure_to(nu: DegreesOfFreedom, a: &Integrand, epsilon: f64, n: usize) -> Result<QuadratureResult> {
    if !is_simple_node_count(n) {
        return Err(Error::InvalidGrid(format!("{n} is not of the form 4 * 2^k + 1")));
    }
    simple_run(nu, a, epsilon, Stop::Fixed { n })
}

/// Whether `n` is reachable by halving from 5 nodes.
pub fn is_simple_node_count(n: usize) -> bool {
    n >= SIMPLE_INITIAL_NODES && (n - 1).is_power_of_two()
}

/// Grid of iteration `k` of the exponential procedure.
pub fn exponential_grid(y_lo0: f64, h0: f64, n0: usize, k: u32) -> GridSpec {
    let scale = 2f64.powi(k as i32);
    GridSpec {
        y_lo: y_lo0 - f64::from(k) * h0,
        h: h0 / scale,
        n: (n0 + 2 * k as usize) << k,
    }
}

/// Widening-and-halving procedure: start from the window with trimming
/// bound `initial_target`, `h_0 = d_0 / n0`, then for each `k` move the left
/// edge out by `h_0`, widen the window by `2 h_0` and halve `h`. Iteration
/// `k` has `(n0 + 2k) 2^k` nodes and contains every node of iteration
/// `k - 1`; only new nodes are evaluated.
pub fn exponential_procedure(
    nu: DegreesOfFreedom,
    a: &Integrand,
    n0: usize,
    initial_target: f64,
    k_max: u32,
) -> Result<QuadratureResult> {
    if n0 < 2 {
        return Err(Error::InvalidGrid(format!("n0 = {n0} is below 2")));
    }
    if k_max > 24 {
        return Err(Error::InvalidGrid(format!("k_max = {k_max} is too large")));
    }
    let window = solve_window(nu, initial_target)?;
    let w = TransformedWeight::new(nu);
    let h0 = window.d / n0 as f64;

    let mut calls = 0;
    let mut g: Vec<f64> = Vec::new();
    let mut history = Vec::new();
    let mut last_grid = exponential_grid(window.y_lo, h0, n0, 0);
    for k in 0..=k_max {
        let grid = exponential_grid(window.y_lo, h0, n0, k);
        let mut refined = vec![0.0; grid.n];
        let mut fresh = vec![true; grid.n];
        if k > 0 {
            // old node i sits at new index 2^k + 2i
            let offset = 1usize << k;
            for (i, &old) in g.iter().enumerate() {
                refined[offset + 2 * i] = old;
                fresh[offset + 2 * i] = false;
            }
        }
        for j in 0..grid.n {
            if fresh[j] {
                refined[j] = weighted_value(&w, a, grid.node(j), &mut calls)?;
            }
        }
        g = refined;
        history.push(Iteration { n: grid.n, h: grid.h, value: weighted_sum(grid.h, &g), evaluations: calls });
        last_grid = grid;
    }

    let est = successive_difference(&history);
    Ok(QuadratureResult {
        value: history.last().map_or(0.0, |it| it.value),
        evaluations: calls,
        est_discretization_error: est,
        // the last node is y_lo + d - h
        trimming_bound: trimming_bound(nu, last_grid.y_lo, last_grid.span()),
        converged: history.len() >= 2 && est.is_finite(),
        history,
    })
}

/// `(n, log10 |A - exact|)` per iteration, with errors below the
/// double-precision floor reported at the floor.
pub fn convergence_diagnostic(result: &QuadratureResult, exact: f64) -> Vec<(usize, f64)> {
    result
        .history
        .iter()
        .map(|it| (it.n, (it.value - exact).abs().max(ERROR_FLOOR).log10()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(n: u32) -> DegreesOfFreedom {
        DegreesOfFreedom::new(n).unwrap()
    }

    #[test]
    fn zero_integrand_sums_to_zero() {
        let g = GridSpec::new(-3.0, 0.25, 40).unwrap();
        assert_eq!(trapezoid_sum(nu(2), &Integrand::constant(0.0), g).unwrap(), 0.0);
    }

    #[test]
    fn single_node_is_psi() {
        let w = TransformedWeight::new(nu(3));
        let m = w.mode().unwrap();
        let g = GridSpec::new(m, 1.0, 1).unwrap();
        assert_eq!(trapezoid_sum(nu(3), &Integrand::constant(1.0), g).unwrap(), w.psi(m));
    }

    #[test]
    fn bound_violation_is_reported() {
        let a = Integrand::new(|x| 2.0 * x, 1.0).unwrap();
        let g = GridSpec::new(-1.0, 0.5, 9).unwrap();
        assert!(matches!(trapezoid_sum(nu(2), &a, g), Err(Error::BoundViolation { .. })));
        assert!(Integrand::new(|_| 0.0, 0.0).is_err());
    }

    #[test]
    fn invalid_grids() {
        assert!(GridSpec::new(0.0, 0.0, 3).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0).is_err());
        assert!(GridSpec::new(f64::NAN, 1.0, 3).is_err());
        assert!(simple_procedure_to(nu(2), &Integrand::constant(1.0), 1e-10, 12).is_err());
        assert!(simple_procedure(nu(2), &Integrand::constant(1.0), 1e-10, 4).is_err());
        assert!(exponential_procedure(nu(2), &Integrand::constant(1.0), 1, 1e-6, 2).is_err());
    }

    #[test]
    fn node_count_law() {
        let counts: Vec<usize> = (0..4).map(|k| exponential_grid(0.0, 1.0, 4, k).n).collect();
        assert_eq!(counts, [4, 12, 32, 80]);
        assert!(is_simple_node_count(65));
        assert!(!is_simple_node_count(64));
    }

    #[test]
    fn simple_procedure_normalizes() {
        let r = simple_procedure(nu(2), &Integrand::constant(1.0), 1e-17, 1025).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-14, "{}", r.value);
        assert_eq!(r.evaluations, r.history.last().unwrap().n);
    }

    #[test]
    fn fixed_budget_counts_each_node_once() {
        let r = simple_procedure_to(nu(4), &Integrand::constant(1.0), 1e-17, 65).unwrap();
        let ns: Vec<usize> = r.history.iter().map(|it| it.n).collect();
        assert_eq!(ns, [5, 9, 17, 33, 65]);
        assert_eq!(r.evaluations, 65);
        assert!(r.trimming_bound <= crate::ERROR_FLOOR);
    }

    #[test]
    fn diagnostic_floors_errors() {
        let r = simple_procedure_to(nu(2), &Integrand::constant(1.0), 1e-17, 33).unwrap();
        let diag = convergence_diagnostic(&r, r.value);
        assert_eq!(diag.last().unwrap().1, ERROR_FLOOR.log10());
        assert_eq!(diag.len(), r.history.len());
    }
}
