//! Quadrature for expectations of the form `E[a(R / sqrt(nu))]`, `R ~ chi_nu`.
//!
//! The main route is the change of variable `x(y) = exp(y/2 - exp(-y))`
//! followed by the trapezoidal rule on a window chosen from a closed-form
//! bound on the trimmed mass ([`mori`], [`trapz`]). Three Gaussian baselines
//! ([`baselines`]) and a known-answer test family ([`scenario`]) are provided
//! for comparison.

pub mod baselines;
pub mod error;
pub mod gauss;
pub mod mori;
pub mod scenario;
pub mod specfun;
pub mod sum;
pub mod trapz;

pub use error::{Error, Result};
pub use specfun::DegreesOfFreedom;
pub use trapz::{Integrand, QuadratureResult};

/// Half an ulp of 1.0, the resolution of results near 1 in double precision.
///
/// Errors at or below this are indistinguishable from zero for values in `[0.5, 1)`.
pub const ERROR_FLOOR: f64 = f64::EPSILON / 2.0;
