//! Plot-ready samples behind the figures. Nothing is rendered here.

use serde::Serialize;

use chiquad::baselines::chi_scaled_quantile;
use chiquad::gauss::generalized_laguerre_rule;
use chiquad::scenario::ScenarioSpec;
use chiquad::specfun::chi2_quantile_tails;
use chiquad::{DegreesOfFreedom, Result};

use crate::tables::DEFAULT_ALPHAS;

/// Largest Laguerre node kept in the scatterplot data.
pub const SCATTER_Y_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// `a(x)` for `nu = 1, 2` and the normal limit, `alpha = 0.05`.
    Integrand,
    /// `d_nu(y) = a(sqrt(2 y / nu))`.
    LaguerreIntegrand,
    /// Laguerre nodes and weights for `(nu, m) = (1, 65), (2, 33)`.
    LaguerreScatter,
    /// `b_nu(z) = a(F_nu^{-1}((z + 1)/2))`.
    InverseCdfIntegrand,
}

impl FigureId {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Self::Integrand),
            3 => Some(Self::LaguerreIntegrand),
            4 => Some(Self::LaguerreScatter),
            5 => Some(Self::InverseCdfIntegrand),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub nu: String,
    pub x: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaguerreRow {
    pub nu: u32,
    pub alpha: f64,
    pub y: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub nu: u32,
    pub m: usize,
    pub y: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseCdfRow {
    pub nu: u32,
    pub alpha: f64,
    pub z: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FigureData {
    Integrand(Vec<CurveRow>),
    LaguerreIntegrand(Vec<LaguerreRow>),
    LaguerreScatter(Vec<ScatterRow>),
    InverseCdfIntegrand(Vec<InverseCdfRow>),
}

impl FigureData {
    pub fn len(&self) -> usize {
        match self {
            Self::Integrand(r) => r.len(),
            Self::LaguerreIntegrand(r) => r.len(),
            Self::LaguerreScatter(r) => r.len(),
            Self::InverseCdfIntegrand(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn dof(n: u32) -> Result<DegreesOfFreedom> {
    DegreesOfFreedom::new(n)
}

/// `points` equally spaced values from `lo` to `hi` inclusive.
fn linspace(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = if points > 1 { (hi - lo) / (points - 1) as f64 } else { 0.0 };
    (0..points).map(move |i| if i + 1 == points && points > 1 { hi } else { lo + step * i as f64 })
}

fn integrand_curves(points: usize) -> Result<Vec<CurveRow>> {
    let curves = [
        ("1", ScenarioSpec::new(dof(1)?, 0.05)?),
        ("2", ScenarioSpec::new(dof(2)?, 0.05)?),
        ("inf", ScenarioSpec::normal_limit(dof(1)?, 0.05)?),
    ];
    let mut rows = Vec::new();
    for (label, spec) in curves {
        for x in linspace(0.0, 3.0, points) {
            rows.push(CurveRow { nu: label.to_string(), x, a: spec.eval(x) });
        }
    }
    Ok(rows)
}

fn laguerre_integrands(points: usize) -> Result<Vec<LaguerreRow>> {
    let mut rows = Vec::new();
    for n in [1u32, 2, 3, 10] {
        let k = dof(n)?;
        // y = chi2 / 2; sample up to its 1 - 1e-6 point
        let y_max = 0.5 * chi2_quantile_tails(k, 1.0 - 1e-6, 1e-6)?;
        for alpha in DEFAULT_ALPHAS {
            let spec = ScenarioSpec::new(k, alpha)?;
            for y in linspace(0.0, y_max, points) {
                rows.push(LaguerreRow { nu: n, alpha, y, d: spec.eval((2.0 * y / f64::from(n)).sqrt()) });
            }
        }
    }
    Ok(rows)
}

fn laguerre_scatter() -> Result<Vec<ScatterRow>> {
    let mut rows = Vec::new();
    for (n, m) in [(1u32, 65usize), (2, 33)] {
        let rule = generalized_laguerre_rule(0.5 * f64::from(n) - 1.0, m)?;
        for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
            if y <= SCATTER_Y_MAX {
                rows.push(ScatterRow { nu: n, m, y, w });
            }
        }
    }
    Ok(rows)
}

fn inverse_cdf_integrands(points: usize) -> Result<Vec<InverseCdfRow>> {
    let mut rows = Vec::new();
    for n in [1u32, 3, 10, 100] {
        let k = dof(n)?;
        for alpha in DEFAULT_ALPHAS {
            let spec = ScenarioSpec::new(k, alpha)?;
            for z in linspace(-1.0, 1.0, points) {
                let x = chi_scaled_quantile(k, 0.5 * (1.0 + z), 0.5 * (1.0 - z))?;
                rows.push(InverseCdfRow { nu: n, alpha, z, b: spec.eval(x) });
            }
        }
    }
    Ok(rows)
}

/// Samples for `figure`; `points` per curve where the figure has curves.
pub fn figure_data(figure: FigureId, points: usize) -> Result<FigureData> {
    Ok(match figure {
        FigureId::Integrand => FigureData::Integrand(integrand_curves(points)?),
        FigureId::LaguerreIntegrand => FigureData::LaguerreIntegrand(laguerre_integrands(points)?),
        FigureId::LaguerreScatter => FigureData::LaguerreScatter(laguerre_scatter()?),
        FigureId::InverseCdfIntegrand => FigureData::InverseCdfIntegrand(inverse_cdf_integrands(points)?),
    })
}
