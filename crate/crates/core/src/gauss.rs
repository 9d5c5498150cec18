//! Gauss-Legendre and generalized Gauss-Laguerre rules by the Golub-Welsch
//! method: nodes are the eigenvalues of the Jacobi matrix and weights are
//! the squared first components of its normalized eigenvectors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::log_gamma;

pub const LEGENDRE_MAX_NODES: usize = 500;
pub const LAGUERRE_MAX_NODES: usize = 200;
const QL_MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleKind {
    Legendre,
    GeneralizedLaguerre { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussRule {
    pub kind: RuleKind,
    pub m: usize,
    /// Strictly increasing.
    pub nodes: Vec<f64>,
    /// Weights for the unnormalized weight function; may overflow for
    /// Laguerre rules with large `alpha`, in which case use `probabilities`.
    pub weights: Vec<f64>,
    /// Weights divided by their total, summing to one.
    pub probabilities: Vec<f64>,
    /// Natural log of the total weight `int w`.
    pub ln_mass: f64,
}

impl GaussRule {
    /// `sum_j w_j f(x_j)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Symmetric tridiagonal eigenproblem by implicit QL with Wilkinson shifts.
/// `diag` holds the diagonal, `off[i]` couples `i` and `i + 1`. Returns
/// eigenvalues and the first component of each normalized eigenvector.
fn tridiagonal_eigen(mut d: Vec<f64>, off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::EigenNoConvergence { m: n });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let upper = z[i + 1];
                z[i + 1] = s * z[i] + c * upper;
                z[i] = c * z[i] - s * upper;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

fn build(kind: RuleKind, diag: Vec<f64>, off: Vec<f64>, ln_mass: f64) -> Result<GaussRule> {
    let m = diag.len();
    let (values, first) = tridiagonal_eigen(diag, &off)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let nodes: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let squares: Vec<f64> = order.iter().map(|&i| first[i] * first[i]).collect();
    let total: f64 = squares.iter().sum();
    let probabilities: Vec<f64> = squares.iter().map(|&q| q / total).collect();
    let mass = ln_mass.exp();
    let weights = probabilities.iter().map(|&q| q * mass).collect();
    Ok(GaussRule { kind, m, nodes, weights, probabilities, ln_mass })
}

/// `m`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn legendre_rule(m: usize) -> Result<GaussRule> {
    if m == 0 || m > LEGENDRE_MAX_NODES {
        return Err(Error::Domain { what: "Legendre node count", value: m as f64 });
    }
    let diag = vec![0.0; m];
    let off = (1..m)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let mut rule = build(RuleKind::Legendre, diag, off, std::f64::consts::LN_2)?;
    // exact symmetry
    for j in 0..m / 2 {
        let x = 0.5 * (rule.nodes[m - 1 - j] - rule.nodes[j]);
        rule.nodes[j] = -x;
        rule.nodes[m - 1 - j] = x;
        let w = 0.5 * (rule.weights[j] + rule.weights[m - 1 - j]);
        rule.weights[j] = w;
        rule.weights[m - 1 - j] = w;
        let q = 0.5 * w;
        rule.probabilities[j] = q;
        rule.probabilities[m - 1 - j] = q;
    }
    if m % 2 == 1 {
        rule.nodes[m / 2] = 0.0;
    }
    Ok(rule)
}

/// `m`-point rule for `int_0^inf f(y) y^alpha e^{-y} dy`, `alpha > -1`.
pub fn generalized_laguerre_rule(alpha: f64, m: usize) -> Result<GaussRule> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::Domain { what: "Laguerre alpha", value: alpha });
    }
    if m == 0 || m > LAGUERRE_MAX_NODES {
        return Err(Error::Domain { what: "Laguerre node count", value: m as f64 });
    }
    let diag = (0..m).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let off = (1..m)
        .map(|k| {
            let k = k as f64;
            (k * (k + alpha)).sqrt()
        })
        .collect();
    build(RuleKind::GeneralizedLaguerre { alpha }, diag, off, log_gamma(alpha + 1.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_legendre_rules() {
        let one = legendre_rule(1).unwrap();
        assert_eq!(one.nodes, [0.0]);
        assert!((one.weights[0] - 2.0).abs() < 1e-15);
        let two = legendre_rule(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((two.nodes[0] + r).abs() < 1e-15 && (two.nodes[1] - r).abs() < 1e-15);
        assert!((two.weights[0] - 1.0).abs() < 1e-15 && (two.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_degree_eight() {
        let rule = legendre_rule(5).unwrap();
        assert!((rule.integrate(|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn laguerre_first_rule() {
        let rule = generalized_laguerre_rule(0.0, 1).unwrap();
        assert!((rule.nodes[0] - 1.0).abs() < 1e-15);
        assert!((rule.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn laguerre_mass_and_domain() {
        let rule = generalized_laguerre_rule(-0.5, 65).unwrap();
        let total: f64 = rule.weights.iter().sum();
        assert!((total - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(rule.nodes.iter().all(|&y| y > 0.0));
        assert!(generalized_laguerre_rule(-1.0, 3).is_err());
        assert!(generalized_laguerre_rule(0.0, 0).is_err());
        assert!(generalized_laguerre_rule(0.0, 201).is_err());
        assert!(legendre_rule(501).is_err());
    }

    #[test]
    fn large_alpha_keeps_probabilities() {
        let rule = generalized_laguerre_rule(499.0, 33).unwrap();
        let total: f64 = rule.probabilities.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!(rule.weights.iter().all(|w| w.is_infinite()));
        // mean of Gamma(500, 1)
        let mean: f64 = rule.nodes.iter().zip(&rule.probabilities).map(|(y, q)| y * q).sum();
        assert!((mean - 500.0).abs() < 1e-10);
    }
}
