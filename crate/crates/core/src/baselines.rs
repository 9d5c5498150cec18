//! Comparison integrators built on Gauss rules: generalized Gauss-Laguerre
//! after `y = nu x^2 / 2`, Gauss-Legendre after the probability integral
//! transform, and Gauss-Legendre on the truncated Mori window.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauss::{generalized_laguerre_rule, legendre_rule};
use crate::mori::{transform, MoriWindow, TransformedWeight};
use crate::specfun::{chi2_quantile_tails, DegreesOfFreedom};
use crate::sum::CompensatedSum;
use crate::trapz::{rounding_allowance, Integrand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    GenGaussLaguerre,
    InverseCdfLegendre,
    TruncatedLegendre,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineResult {
    pub method: BaselineMethod,
    pub m: usize,
    pub value: f64,
    pub evaluations: usize,
    /// Mass of the weight outside the integration range; nonzero only for
    /// the truncated rule.
    pub trimming_bound: f64,
    /// How far the same nodes and weights miss the known mass of the
    /// weight over the integration range. Costs no integrand calls.
    pub weight_defect: f64,
}

impl BaselineResult {
    /// `(weight_defect + trimming_bound) * a_bound` plus rounding. Exact for
    /// constant integrands; for others the rule's own discretization error
    /// on `a` is not covered.
    pub fn error_bound(&self, a_bound: f64) -> f64 {
        (self.weight_defect + self.trimming_bound) * a_bound + rounding_allowance(self.value)
    }
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain { what: "node count", value: 0.0 });
    }
    Ok(())
}

/// `Gamma(nu/2)^-1 sum_j w_j a(sqrt(2 y_j / nu))` with the Laguerre rule for
/// `alpha = nu/2 - 1`. The normalized weights already carry the `1/Gamma`
/// factor, so nothing overflows for large `nu`.
pub fn gen_gauss_laguerre(nu: DegreesOfFreedom, a: &Integrand, m: usize) -> Result<BaselineResult> {
    check_m(m)?;
    let rule = generalized_laguerre_rule(nu.half() - 1.0, m)?;
    let scale = 2.0 / nu.as_f64();
    let mut sum = CompensatedSum::new();
    let mut mass = CompensatedSum::new();
    for (&y, &q) in rule.nodes.iter().zip(&rule.probabilities) {
        sum.add(q * a.eval((scale * y).sqrt())?);
        mass.add(q);
    }
    Ok(BaselineResult {
        method: BaselineMethod::GenGaussLaguerre,
        m,
        value: sum.value(),
        evaluations: m,
        trimming_bound: 0.0,
        weight_defect: (mass.value() - 1.0).abs(),
    })
}

/// `F_nu^{-1}(p) = sqrt(Q_nu^{-1}(p) / nu)` given both tails of `p`.
pub fn chi_scaled_quantile(nu: DegreesOfFreedom, p: f64, q: f64) -> Result<f64> {
    Ok((chi2_quantile_tails(nu, p, q)? / nu.as_f64()).sqrt())
}

/// `sum_j w_j a(F_nu^{-1}((z_j + 1)/2)) / 2` with the Legendre rule.
pub fn inverse_cdf_legendre(nu: DegreesOfFreedom, a: &Integrand, m: usize) -> Result<BaselineResult> {
    check_m(m)?;
    let rule = legendre_rule(m)?;
    let mut sum = CompensatedSum::new();
    let mut mass = CompensatedSum::new();
    for (&z, &q) in rule.nodes.iter().zip(&rule.probabilities) {
        // both tails formed without cancellation
        let x = chi_scaled_quantile(nu, 0.5 * (1.0 + z), 0.5 * (1.0 - z))?;
        sum.add(q * a.eval(x)?);
        mass.add(q);
    }
    Ok(BaselineResult {
        method: BaselineMethod::InverseCdfLegendre,
        m,
        value: sum.value(),
        evaluations: m,
        trimming_bound: 0.0,
        weight_defect: (mass.value() - 1.0).abs(),
    })
}

/// `(d/2) sum_j w_j a(x(y_j)) psi_nu(y_j)` with the Legendre rule mapped
/// onto `[y_lo, y_lo + d]`.
pub fn truncated_legendre(
    nu: DegreesOfFreedom,
    a: &Integrand,
    window: &MoriWindow,
    m: usize,
) -> Result<BaselineResult> {
    check_m(m)?;
    if window.nu != nu {
        return Err(Error::Domain { what: "window degrees of freedom", value: window.nu.as_f64() });
    }
    let rule = legendre_rule(m)?;
    let w = TransformedWeight::new(nu);
    let half = 0.5 * window.d;
    let mut sum = CompensatedSum::new();
    let mut mass = CompensatedSum::new();
    for (&z, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let y = window.y_lo + half * (z + 1.0);
        let p = wt * w.psi(y);
        sum.add(p * a.eval(transform(y).x)?);
        mass.add(p);
    }
    // the weight's mass inside the window is 1 - bound
    let defect = (half * mass.value() - (1.0 - window.bound)).abs();
    Ok(BaselineResult {
        method: BaselineMethod::TruncatedLegendre,
        m,
        value: half * sum.value(),
        evaluations: m,
        trimming_bound: window.bound,
        weight_defect: defect,
    })
}
