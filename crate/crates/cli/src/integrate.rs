//! One integral by one method, for ad hoc use.

use serde::Serialize;

use chiquad::baselines::{gen_gauss_laguerre, inverse_cdf_legendre, truncated_legendre};
use chiquad::mori::{solve_window, trimming_target};
use chiquad::trapz::{exponential_procedure, simple_procedure, Iteration, EXPONENTIAL_INITIAL_TARGET};
use chiquad::{DegreesOfFreedom, Result};

use crate::registry::IntegrandChoice;

/// Initial node count of the exponential procedure.
pub const EXPONENTIAL_N0: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MoriTrapezoid,
    MoriExponential,
    GaussLaguerre,
    InverseCdf,
    TruncatedLegendre,
}

impl Method {
    /// Node budget when none is given: the adaptive cap for the trapezoid,
    /// the total node cap for the exponential procedure, and the Gauss
    /// rule size otherwise.
    pub fn default_budget(self, nu: DegreesOfFreedom) -> usize {
        match self {
            Self::MoriTrapezoid => 4097,
            Self::MoriExponential => 1024,
            _ if nu.get() == 1 => 65,
            _ => 33,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrateReport {
    pub method: Method,
    pub nu: u32,
    pub integrand: String,
    pub value: f64,
    pub evaluations: usize,
    /// Discretization estimate plus trimming bound plus rounding; only the
    /// trapezoid procedures produce one.
    pub error_estimate: Option<f64>,
    /// For Gauss methods, how far the rule misses the weight's known mass.
    pub weight_defect: Option<f64>,
    pub exact: Option<f64>,
    pub error: Option<f64>,
    pub converged: bool,
    pub history: Vec<Iteration>,
}

/// Largest `k` with `(n0 + 2k) 2^k <= budget`, at most 24.
fn exponential_depth(budget: usize) -> Option<u32> {
    (0..=24u32).take_while(|&k| (EXPONENTIAL_N0 + 2 * k as usize) << k <= budget).last()
}

pub fn integrate(
    method: Method,
    nu: DegreesOfFreedom,
    choice: IntegrandChoice,
    epsilon: f64,
    budget: Option<usize>,
) -> Result<IntegrateReport> {
    let a = choice.build(nu)?;
    let budget = budget.unwrap_or_else(|| method.default_budget(nu));
    let mut weight_defect = None;
    let (value, evaluations, error_estimate, converged, history) = match method {
        Method::MoriTrapezoid => {
            let r = simple_procedure(nu, &a, epsilon, budget)?;
            (r.value, r.evaluations, Some(r.error_bound()), r.converged, r.history)
        }
        Method::MoriExponential => {
            let k_max = exponential_depth(budget).ok_or_else(|| {
                chiquad::Error::InvalidGrid(format!("budget {budget} is below {EXPONENTIAL_N0} nodes"))
            })?;
            let r = exponential_procedure(nu, &a, EXPONENTIAL_N0, EXPONENTIAL_INITIAL_TARGET, k_max)?;
            (r.value, r.evaluations, Some(r.error_bound()), r.converged, r.history)
        }
        Method::GaussLaguerre | Method::InverseCdf | Method::TruncatedLegendre => {
            let r = match method {
                Method::GaussLaguerre => gen_gauss_laguerre(nu, &a, budget)?,
                Method::InverseCdf => inverse_cdf_legendre(nu, &a, budget)?,
                _ => truncated_legendre(nu, &a, &solve_window(nu, trimming_target(epsilon))?, budget)?,
            };
            weight_defect = Some(r.weight_defect);
            (r.value, r.evaluations, None, true, Vec::new())
        }
    };
    let exact = choice.exact(nu)?;
    Ok(IntegrateReport {
        method,
        nu: nu.get(),
        integrand: choice.to_string(),
        value,
        evaluations,
        error_estimate,
        weight_defect,
        exact,
        error: exact.map(|e| value - e),
        converged,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(n: u32) -> DegreesOfFreedom {
        DegreesOfFreedom::new(n).unwrap()
    }

    #[test]
    fn depth_from_budget() {
        assert_eq!(exponential_depth(4), Some(0));
        assert_eq!(exponential_depth(1024), Some(6));
        assert_eq!(exponential_depth(1023), Some(5));
        assert_eq!(exponential_depth(3), None);
    }

    #[test]
    fn constant_is_one_everywhere() {
        for method in [
            Method::MoriTrapezoid,
            Method::MoriExponential,
            Method::GaussLaguerre,
            Method::InverseCdf,
            Method::TruncatedLegendre,
        ] {
            let r = integrate(method, nu(2), IntegrandChoice::Constant { value: 1.0 }, 1e-17, None).unwrap();
            let bound = r.error_estimate.unwrap_or(1e-14);
            assert!(r.error.unwrap().abs() <= bound, "{method:?}");
        }
    }

    #[test]
    fn laguerre_example() {
        let r = integrate(Method::GaussLaguerre, nu(1), IntegrandChoice::TInterval { alpha: 0.10 }, 1e-17, Some(65))
            .unwrap();
        assert!((r.error.unwrap() / 1.44e-2 - 1.0).abs() < 0.01);
    }
}
