//! The known-answer benchmark `a(x) = 2 Phi(t x) - 1`, whose expectation
//! under `f_nu` is the coverage `1 - alpha` of the t-interval, and the
//! rewriting of weighted moments `E[lambda(X) X^xi]` into the standard form.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{log_gamma, normal_quantile, t_quantile_upper, DegreesOfFreedom};
use crate::trapz::Integrand;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub nu: DegreesOfFreedom,
    pub alpha: f64,
    /// Upper `alpha / 2` point of `t_nu`, or of `N(0, 1)` for the limit curve.
    pub t_crit: f64,
    /// Set when `t_crit` is the normal quantile, the `nu -> inf` limit.
    pub normal_limit: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain { what: "alpha", value: alpha });
    }
    Ok(())
}

impl ScenarioSpec {
    pub fn new(nu: DegreesOfFreedom, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let t_crit = t_quantile_upper(nu, 0.5 * alpha)?;
        Ok(Self { nu, alpha, t_crit, normal_limit: false })
    }

    /// The same integrand with the normal quantile in place of the t
    /// quantile. Its expectation under `f_nu` is no longer `1 - alpha`.
    pub fn normal_limit(nu: DegreesOfFreedom, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let t_crit = -normal_quantile(0.5 * alpha)?;
        Ok(Self { nu, alpha, t_crit, normal_limit: true })
    }

    /// `2 Phi(t_crit x) - 1`, formed as `erf(t_crit x / sqrt 2)`.
    pub fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        libm::erf(self.t_crit * x / SQRT_2)
    }
}

pub fn t_interval_integrand(spec: &ScenarioSpec) -> Integrand {
    let spec = *spec;
    Integrand::new(move |x| spec.eval(x), 1.0).expect("unit bound is valid")
}

/// The coverage `1 - alpha`.
pub fn exact_value(spec: &ScenarioSpec) -> f64 {
    1.0 - spec.alpha
}

/// `int lambda(x) x^xi f_kappa(x) dx` with bounded `lambda`.
#[derive(Clone)]
pub struct WeightedMomentSpec {
    pub kappa: DegreesOfFreedom,
    pub xi: u32,
    pub lambda: Integrand,
}

impl std::fmt::Debug for WeightedMomentSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightedMomentSpec")
            .field("kappa", &self.kappa)
            .field("xi", &self.xi)
            .finish_non_exhaustive()
    }
}

impl WeightedMomentSpec {
    /// `sqrt(kappa / (kappa + xi))`.
    pub fn scale(&self) -> f64 {
        let k = self.kappa.as_f64();
        (k / (k + f64::from(self.xi))).sqrt()
    }
}

/// A weighted moment rewritten as `prefactor * int a(y) f_nu(y) dy`.
#[derive(Debug, Clone)]
pub struct StandardForm {
    pub nu: DegreesOfFreedom,
    pub a: Integrand,
    pub prefactor: f64,
    pub ln_prefactor: f64,
}

/// Substituting `y = c x`, `c = sqrt(kappa / nu)`, `nu = kappa + xi` gives
/// `a(y) = lambda(y / c)` and
/// `prefactor = (2 / kappa)^{xi/2} Gamma(nu/2) / Gamma(kappa/2)`.
pub fn weighted_moment_to_standard(spec: &WeightedMomentSpec) -> Result<StandardForm> {
    let total = spec
        .kappa
        .get()
        .checked_add(spec.xi)
        .ok_or(Error::Domain { what: "kappa + xi", value: f64::INFINITY })?;
    let nu = DegreesOfFreedom::new(total)?;
    let kappa = spec.kappa.as_f64();
    let ln_prefactor = 0.5 * f64::from(spec.xi) * (2.0 / kappa).ln() + log_gamma(nu.half())?
        - log_gamma(spec.kappa.half())?;
    let c = spec.scale();
    let lambda = spec.lambda.clone();
    let a = Integrand::new(
        move |y| lambda.eval(y / c).unwrap_or(f64::NAN),
        spec.lambda.bound(),
    )?;
    Ok(StandardForm { nu, a, prefactor: ln_prefactor.exp(), ln_prefactor })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(n: u32) -> DegreesOfFreedom {
        DegreesOfFreedom::new(n).unwrap()
    }

    #[test]
    fn integrand_basics() {
        let s = ScenarioSpec::new(nu(3), 0.05).unwrap();
        assert_eq!(s.eval(0.0), 0.0);
        assert_eq!(exact_value(&s), 0.95);
        assert!(s.eval(1e6) <= 1.0);
        let lim = ScenarioSpec::normal_limit(nu(3), 0.05).unwrap();
        assert!((lim.eval(1.0) - 0.95).abs() < 1e-15);
        assert!(ScenarioSpec::new(nu(3), 0.0).is_err());
        assert!(ScenarioSpec::new(nu(3), 1.0).is_err());
    }

    #[test]
    fn scale_for_equal_parts() {
        let spec = WeightedMomentSpec { kappa: nu(4), xi: 4, lambda: Integrand::constant(1.0) };
        assert!((spec.scale() - 0.5f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn prefactor_closed_forms() {
        // E[X^2] = 1 for X = R / sqrt(2), R ~ chi_2, and int f_4 = 1
        let spec = WeightedMomentSpec { kappa: nu(2), xi: 2, lambda: Integrand::constant(1.0) };
        let form = weighted_moment_to_standard(&spec).unwrap();
        assert_eq!(form.nu, nu(4));
        assert!((form.prefactor - 1.0).abs() < 1e-14);
        // E[R / sqrt 3], R ~ chi_3
        let spec = WeightedMomentSpec { kappa: nu(3), xi: 1, lambda: Integrand::constant(1.0) };
        let form = weighted_moment_to_standard(&spec).unwrap();
        let want = (2.0f64 / 3.0).sqrt() / (0.5 * std::f64::consts::PI.sqrt());
        assert!((form.prefactor - want).abs() < 1e-13);
    }
}
