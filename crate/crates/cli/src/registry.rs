//! Built-in integrands addressable from the command line as `name[:param]`.

use std::fmt;
use std::str::FromStr;

use chiquad::scenario::{exact_value, t_interval_integrand, ScenarioSpec};
use chiquad::{DegreesOfFreedom, Integrand, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrandChoice {
    /// `2 Phi(t x) - 1` with `t` the upper `alpha/2` point of `t_nu`.
    TInterval { alpha: f64 },
    Constant { value: f64 },
    /// `exp(-rate x)`.
    ExpDecay { rate: f64 },
}

impl IntegrandChoice {
    pub const NAMES: [&'static str; 3] = ["t-interval", "constant", "exp-decay"];

    pub fn build(&self, nu: DegreesOfFreedom) -> Result<Integrand> {
        match *self {
            Self::TInterval { alpha } => Ok(t_interval_integrand(&ScenarioSpec::new(nu, alpha)?)),
            Self::Constant { value } => Ok(Integrand::constant(value)),
            Self::ExpDecay { rate } => Integrand::new(move |x| (-rate * x).exp(), 1.0),
        }
    }

    /// The exact expectation, where known.
    pub fn exact(&self, nu: DegreesOfFreedom) -> Result<Option<f64>> {
        match *self {
            Self::TInterval { alpha } => Ok(Some(exact_value(&ScenarioSpec::new(nu, alpha)?))),
            Self::Constant { value } => Ok(Some(value)),
            Self::ExpDecay { .. } => Ok(None),
        }
    }
}

impl fmt::Display for IntegrandChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TInterval { alpha } => write!(f, "t-interval:{alpha}"),
            Self::Constant { value } => write!(f, "constant:{value}"),
            Self::ExpDecay { rate } => write!(f, "exp-decay:{rate}"),
        }
    }
}

impl FromStr for IntegrandChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let number = |default: Option<f64>| -> std::result::Result<f64, String> {
            match param {
                Some(p) => p.parse::<f64>().map_err(|_| format!("bad parameter `{p}` for `{name}`")),
                None => default.ok_or_else(|| format!("`{name}` needs a parameter, e.g. `{name}:0.05`")),
            }
        };
        match name {
            "t-interval" => {
                let alpha = number(None)?;
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(format!("alpha must lie in (0, 1), got {alpha}"));
                }
                Ok(Self::TInterval { alpha })
            }
            "constant" => {
                let value = number(Some(1.0))?;
                if !value.is_finite() {
                    return Err("constant must be finite".into());
                }
                Ok(Self::Constant { value })
            }
            "exp-decay" => {
                let rate = number(Some(1.0))?;
                if !(rate >= 0.0) || !rate.is_finite() {
                    return Err(format!("rate must be finite and nonnegative, got {rate}"));
                }
                Ok(Self::ExpDecay { rate })
            }
            other => Err(format!("unknown integrand `{other}`; known: {}", Self::NAMES.join(", "))),
        }
    }
}
