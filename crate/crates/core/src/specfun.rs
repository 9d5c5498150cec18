//! Special functions used throughout the crate.
//!
//! Gamma and incomplete gamma, the standard normal and Student t
//! distributions, and the density `f_nu` of `R / sqrt(nu)` with `R ~ chi_nu`.
//! Everything here is a pure function of its arguments.

use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Largest `nu` for which `Gamma(nu / 2)` is formed by exact products.
const GAMMA_HALF_PRODUCT_MAX: u32 = 340;

/// Degrees of freedom of the chi distribution, always at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct DegreesOfFreedom(u32);

impl DegreesOfFreedom {
    pub fn new(nu: u32) -> Result<Self> {
        if nu == 0 {
            return Err(Error::Domain { what: "degrees of freedom", value: 0.0 });
        }
        Ok(Self(nu))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// `nu / 2`, the shape of the matching gamma distribution.
    pub fn half(self) -> f64 {
        0.5 * f64::from(self.0)
    }
}

impl TryFrom<u32> for DegreesOfFreedom {
    type Error = Error;
    fn try_from(nu: u32) -> Result<Self> {
        Self::new(nu)
    }
}

impl From<DegreesOfFreedom> for u32 {
    fn from(nu: DegreesOfFreedom) -> u32 {
        nu.0
    }
}

impl std::fmt::Display for DegreesOfFreedom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

// ---------------------------------------------------------------------------
// Gamma function

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(z)` for `z > 0` (Lanczos, g = 7, nine terms).
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_infinite() {
        return Err(Error::Domain { what: "log_gamma", value: z });
    }
    if z < 0.5 {
        return Ok(lanczos_ln_gamma(z + 1.0) - z.ln());
    }
    Ok(lanczos_ln_gamma(z))
}

fn lanczos_ln_gamma(z: f64) -> f64 {
    let z = z - 1.0;
    let mut series = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// `Gamma(nu / 2)` from exact factorial-type products, for `1 <= nu <= 340`.
pub(crate) fn gamma_half(nu: u32) -> f64 {
    debug_assert!(nu >= 1 && nu <= GAMMA_HALF_PRODUCT_MAX);
    if nu % 2 == 0 {
        (1..nu / 2).fold(1.0, |acc, i| acc * f64::from(i))
    } else {
        (1..=nu / 2).fold(SQRT_PI, |acc, i| acc * (f64::from(i) - 0.5))
    }
}

/// `ln Gamma(a)` with the exact-product path taken for half-integers.
fn ln_gamma_accurate(a: f64) -> f64 {
    let twice = 2.0 * a;
    if twice.fract() == 0.0 && twice >= 1.0 && twice <= f64::from(GAMMA_HALF_PRODUCT_MAX) {
        gamma_half(twice as u32).ln()
    } else {
        lanczos_ln_gamma(a)
    }
}

/// Remainder of Stirling's formula,
/// `s(a) = ln Gamma(a) - (a - 1/2) ln a + a - ln sqrt(2 pi)`.
pub(crate) fn stirling_error(a: f64) -> f64 {
    if a >= 10.0 {
        let r = 1.0 / a;
        let r2 = r * r;
        const C: [f64; 8] = [
            1.0 / 12.0,
            -1.0 / 360.0,
            1.0 / 1260.0,
            -1.0 / 1680.0,
            1.0 / 1188.0,
            -691.0 / 360_360.0,
            1.0 / 156.0,
            -3617.0 / 122_400.0,
        ];
        let mut acc = 0.0;
        for &c in C.iter().rev() {
            acc = acc * r2 + c;
        }
        return acc * r;
    }
    ln_gamma_accurate(a) - (a - 0.5) * a.ln() + a - LN_SQRT_2PI
}

/// `e^t - 1 - t` without cancellation near zero.
pub(crate) fn exp_excess(t: f64) -> f64 {
    if t.abs() < 0.5 {
        let mut term = 0.5 * t * t;
        let mut sum = term;
        for n in 3..40 {
            term *= t / f64::from(n);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        t.exp_m1() - t
    }
}

/// `a ln(a / x) + x - a`, the deviance term of the gamma/Poisson density.
fn deviance(a: f64, x: f64) -> f64 {
    if (a - x).abs() < 0.1 * (a + x) {
        let v = (a - x) / (a + x);
        let mut s = (a - x) * v;
        let mut ej = 2.0 * a * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / f64::from(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        a * (a / x).ln() + x - a
    }
}

/// `x^a e^{-x} / Gamma(a + 1)`, evaluated through the deviance so that
/// large shapes keep full relative accuracy.
fn gamma_kernel(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    (-deviance(a, x) - stirling_error(a)).exp() / (2.0 * PI * a).sqrt()
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma, chi-square distribution

const SERIES_MAX_TERMS: usize = 200_000;
const TINY: f64 = 1e-300;

/// Returns `(P(a, x), Q(a, x))`; the smaller of the two carries full
/// relative accuracy.
fn incomplete_gamma(a: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let kernel = gamma_kernel(a, x);
    if x < a + 1.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..SERIES_MAX_TERMS {
            term *= x / (a + n as f64);
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        let p = kernel * sum;
        (p, 1.0 - p)
    } else {
        // modified Lentz on the Legendre continued fraction for Gamma(a, x)
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..SERIES_MAX_TERMS {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() <= 1e-16 {
                break;
            }
        }
        let q = kernel * a * h;
        (1.0 - q, q)
    }
}

fn check_chi2_arg(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain { what: "chi2 argument", value: t });
    }
    Ok(())
}

/// `P(chi2_nu <= t)`.
pub fn chi2_cdf(nu: DegreesOfFreedom, t: f64) -> Result<f64> {
    check_chi2_arg(t)?;
    Ok(incomplete_gamma(nu.half(), 0.5 * t).0)
}

/// `P(chi2_nu > t)`, computed from the upper branch directly.
pub fn chi2_sf(nu: DegreesOfFreedom, t: f64) -> Result<f64> {
    check_chi2_arg(t)?;
    Ok(incomplete_gamma(nu.half(), 0.5 * t).1)
}

/// Density of `chi2_nu` at `t`.
pub fn chi2_pdf(nu: DegreesOfFreedom, t: f64) -> f64 {
    if t < 0.0 || t.is_nan() {
        return 0.0;
    }
    let a = nu.half();
    if t == 0.0 {
        return match nu.get() {
            1 => f64::INFINITY,
            2 => 0.5,
            _ => 0.0,
        };
    }
    let x = 0.5 * t;
    0.5 * (a / x) * gamma_kernel(a, x)
}

/// Quantile of `chi2_nu`: the `t` with `P(chi2_nu <= t) = p`.
pub fn chi2_quantile(nu: DegreesOfFreedom, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain { what: "chi2 quantile probability", value: p });
    }
    chi2_quantile_tails(nu, p, 1.0 - p)
}

/// Quantile given both tail probabilities `p` (lower) and `q = 1 - p`
/// (upper). The smaller of the two drives the iteration, so callers that
/// can form `q` without cancellation keep relative accuracy in the upper tail.
pub fn chi2_quantile_tails(nu: DegreesOfFreedom, p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain { what: "chi2 quantile probability", value: p });
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if q == 0.0 {
        return Ok(f64::INFINITY);
    }
    let a = nu.half();
    let lower = p <= q;
    let target = if lower { p.ln() } else { q.ln() };

    // Wilson-Hilferty start, falling back to the small-t power law.
    let z = if lower { normal_quantile(p)? } else { -normal_quantile(q)? };
    let k = 2.0 / (9.0 * nu.as_f64());
    let cube = 1.0 - k + z * k.sqrt();
    let mut t0 = nu.as_f64() * cube * cube * cube;
    if !(t0 > 0.0) || (lower && p < 0.05 && nu.get() <= 2) {
        t0 = 2.0 * ((p.ln() + ln_gamma_accurate(a + 1.0)) / a).exp();
        if !(t0 > 0.0) {
            t0 = f64::MIN_POSITIVE;
        }
    }

    // increasing function of u = ln t
    let eval = |u: f64| {
        let t = u.exp();
        let (pl, qu) = incomplete_gamma(a, 0.5 * t);
        let dens = chi2_pdf(nu, t);
        if lower {
            (pl.ln() - target, t * dens / pl)
        } else {
            (target - qu.ln(), t * dens / qu)
        }
    };
    let u = newton_bracketed(eval, t0.ln(), 1.0, 1e-15, "chi2_quantile")?;
    Ok(u.exp())
}

// ---------------------------------------------------------------------------
// Scaled chi density

/// Normalizing data for `f_nu(x) = tau x^{nu-1} exp(-nu x^2 / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiScaledDensityParams {
    pub nu: DegreesOfFreedom,
    /// `tau_nu = nu^{nu/2} / (Gamma(nu/2) 2^{nu/2 - 1})`; infinite once it
    /// overflows (nu beyond roughly 1400), see `ln_tau`.
    pub tau: f64,
    pub ln_tau: f64,
    /// `tau_nu e^{-nu/2}`, the density value at `x = 1`. Always finite.
    pub peak: f64,
}

impl ChiScaledDensityParams {
    pub fn new(nu: DegreesOfFreedom) -> Self {
        let k = nu.half();
        let (tau, ln_tau, peak) = if k < 10.0 {
            // tau = 2 k^k / Gamma(k)
            let tau = 2.0 * k.powf(k) / gamma_half(nu.get());
            (tau, tau.ln(), small_peak(nu.get()))
        } else {
            let s = stirling_error(k);
            let ln_tau = LN_2 + 0.5 * (k / (2.0 * PI)).ln() - s + k;
            (ln_tau.exp(), ln_tau, 2.0 * (k / (2.0 * PI)).sqrt() * (-s).exp())
        };
        Self { nu, tau, ln_tau, peak }
    }
}

/// Unevaluated sum `hi + lo` carrying about 106 bits.
#[derive(Clone, Copy)]
struct DoubleDouble(f64, f64);

impl DoubleDouble {
    fn from_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self(s, (a - (s - bb)) + (b - bb))
    }

    fn mul(self, o: Self) -> Self {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        Self::from_sum(p, e + self.0 * o.1 + self.1 * o.0)
    }

    fn div(self, o: Self) -> Self {
        let q = self.0 / o.0;
        let r = self.0 - q * o.0 - q.mul_add(o.0, -(q * o.0)) + self.1 - q * o.1;
        Self::from_sum(q, r / o.0)
    }

    fn sqrt_of(k: f64) -> Self {
        let s = k.sqrt();
        Self::from_sum(s, (-s).mul_add(s, k) / (2.0 * s))
    }
}

const EXP_MINUS_HALF_DD: DoubleDouble = DoubleDouble(0.606_530_659_712_633_4, -6.593_178_415_491_414e-19);
const SQRT_PI_DD: DoubleDouble = DoubleDouble(1.772_453_850_905_516, -7.666_586_499_825_799e-17);

/// `f_nu(1) = 2 k^k e^{-k} / Gamma(k)`, `k = nu / 2 < 10`, correctly
/// rounded up to a tiny double-double residual. Every factor is an exact
/// product apart from `sqrt k`, `e^{-1/2}` and `sqrt pi`.
fn small_peak(nu: u32) -> f64 {
    debug_assert!((1..20).contains(&nu));
    let m = nu / 2;
    let k = 0.5 * f64::from(nu);
    let one = DoubleDouble(1.0, 0.0);
    let mut e = one;
    for _ in 0..nu {
        e = e.mul(EXP_MINUS_HALF_DD);
    }
    let mut pow = one;
    for _ in 0..m {
        pow = pow.mul(DoubleDouble(k, 0.0));
    }
    let gamma = if nu % 2 == 0 {
        DoubleDouble((1..m).fold(1.0, |acc, i| acc * f64::from(i)), 0.0)
    } else {
        pow = pow.mul(DoubleDouble::sqrt_of(k));
        let odd = (1..=m).fold(1.0, |acc, i| acc * (f64::from(i) - 0.5));
        SQRT_PI_DD.mul(DoubleDouble(odd, 0.0))
    };
    let c = pow.mul(e).div(gamma);
    2.0 * (c.0 + c.1)
}

/// Density of `R / sqrt(nu)`, `R ~ chi_nu`; zero for `x <= 0`.
pub fn chi_scaled_pdf(params: &ChiScaledDensityParams, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    let k = params.nu.half();
    if x < 1e-3 && params.tau.is_finite() {
        let nu = params.nu.as_f64();
        return params.tau * x.powf(nu - 1.0) * (-k * x * x).exp();
    }
    let ln_x = x.ln();
    params.peak * (-k * exp_excess(2.0 * ln_x) - ln_x).exp()
}

// ---------------------------------------------------------------------------
// Normal distribution

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `1 - Phi(x)` without cancellation for large `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Inverse of [`normal_cdf`] on `(0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain { what: "normal quantile probability", value: p });
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Solve sf(x) = q for x > 0 and reflect.
    let (q, sign) = if p < 0.5 { (p, -1.0) } else { (1.0 - p, 1.0) };
    let t = (-2.0 * q.ln()).sqrt();
    let mut x = t - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
        / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t);
    for _ in 0..20 {
        let r = (normal_sf(x) - q) / normal_pdf(x);
        let step = r / (1.0 + 0.5 * r * x);
        x += step;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    Ok(sign * x)
}

// ---------------------------------------------------------------------------
// Incomplete beta and Student t

/// `ln B(a, 1/2)`.
fn ln_beta_half(a: f64) -> f64 {
    let twice = 2.0 * a;
    if twice.fract() == 0.0 && twice >= 1.0 && twice < f64::from(GAMMA_HALF_PRODUCT_MAX) {
        let n = twice as u32;
        return (gamma_half(n) * SQRT_PI / gamma_half(n + 1)).ln();
    }
    if a >= 10.0 {
        let ratio = -0.5 * a.ln() - a * (0.5 / a).ln_1p() + 0.5 + stirling_error(a)
            - stirling_error(a + 0.5);
        return ratio + 0.5 * PI.ln();
    }
    lanczos_ln_gamma(a) + 0.5 * PI.ln() - lanczos_ln_gamma(a + 0.5)
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = f64::from(m);
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= 1e-16 {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` where the caller supplies
/// `x`, `y = 1 - x` and their logarithms, each formed without cancellation.
fn incomplete_beta_parts(a: f64, b: f64, x: f64, y: f64, ln_x: f64, ln_y: f64, ln_beta: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let front = (a * ln_x + b * ln_y - ln_beta).exp();
    if x <= 0.75 {
        // positive-term hypergeometric series, I = front / a * 2F1(a + b, 1; a + 1; x)
        let mut term = 1.0;
        let mut sum = CompensatedSum::new();
        sum.add(1.0);
        for n in 1..2000 {
            let n = f64::from(n);
            term *= x * (a + b + n - 1.0) / (a + n);
            sum.add(term);
            if term <= 1e-17 * sum.value() {
                break;
            }
        }
        return front * sum.value() / a;
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, y) / b
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Domain { what: "incomplete beta shape", value: a.min(b) });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain { what: "incomplete beta argument", value: x });
    }
    let y = 1.0 - x;
    let ln_beta = log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?;
    Ok(incomplete_beta_parts(a, b, x, y, x.ln(), y.ln(), ln_beta))
}

/// Upper tail `P(T > t)` of Student's t with `nu` degrees of freedom.
pub fn t_sf(nu: DegreesOfFreedom, t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t < 0.0 {
        return 1.0 - t_sf(nu, -t);
    }
    if t == 0.0 {
        return 0.5;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let n = nu.as_f64();
    let a = nu.half();
    let r = t * t / n;
    // x = nu / (nu + t^2), y = t^2 / (nu + t^2)
    let x = 1.0 / (1.0 + r);
    let y = r / (1.0 + r);
    let ln_x = -r.ln_1p();
    let ln_y = -(1.0 / r).ln_1p();
    0.5 * incomplete_beta_parts(a, 0.5, x, y, ln_x, ln_y, ln_beta_half(a))
}

/// Distribution function of Student's t.
pub fn t_cdf(nu: DegreesOfFreedom, t: f64) -> f64 {
    if t <= 0.0 {
        t_sf(nu, -t)
    } else {
        1.0 - t_sf(nu, t)
    }
}

/// Density of Student's t.
pub fn t_pdf(nu: DegreesOfFreedom, t: f64) -> f64 {
    let n = nu.as_f64();
    (-(0.5 * (n + 1.0)) * (t * t / n).ln_1p() - ln_beta_half(nu.half())).exp() / n.sqrt()
}

/// The quantile `t_{nu,p}` with `P(T <= t_{nu,p}) = p`.
pub fn t_quantile(nu: DegreesOfFreedom, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain { what: "t quantile probability", value: p });
    }
    if p >= 0.5 {
        t_quantile_upper(nu, 1.0 - p)
    } else {
        Ok(-t_quantile_upper(nu, p)?)
    }
}

/// The `t` with `P(T > t) = q`. Taking the upper tail directly avoids the
/// rounding of `1 - q` when `q` is small.
pub fn t_quantile_upper(nu: DegreesOfFreedom, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain { what: "t quantile probability", value: q });
    }
    if q == 0.5 {
        return Ok(0.0);
    }
    if q > 0.5 {
        return Ok(-t_quantile_upper(nu, 1.0 - q)?);
    }
    // Cornish-Fisher expansion around the normal quantile.
    let z = -normal_quantile(q)?;
    let n = nu.as_f64();
    let z2 = z * z;
    let g1 = (z2 + 1.0) * z / 4.0;
    let g2 = ((5.0 * z2 + 16.0) * z2 + 3.0) * z / 96.0;
    let g3 = (((3.0 * z2 + 19.0) * z2 + 17.0) * z2 - 15.0) * z / 384.0;
    let g4 = ((((79.0 * z2 + 776.0) * z2 + 1482.0) * z2 - 1920.0) * z2 - 945.0) * z / 92_160.0;
    let mut t0 = z + g1 / n + g2 / (n * n) + g3 / (n * n * n) + g4 / (n * n * n * n);
    if !(t0 > 0.0) || !t0.is_finite() {
        t0 = z.max(1e-3);
    }
    let target = q.ln();
    let eval = |u: f64| {
        let t = u.exp();
        let s = t_sf(nu, t);
        (target - s.ln(), t * t_pdf(nu, t) / s)
    };
    let u = newton_bracketed(eval, t0.ln(), 1.0, 1e-15, "t_quantile")?;
    let mut t = u.exp();
    // polish in t itself
    let step = (t_sf(nu, t) - q) / t_pdf(nu, t);
    if step.abs() < 1e-12 * t {
        t += step;
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Root finding

/// Safeguarded Newton iteration for an increasing function `f`, returning
/// `(f(x), f'(x))`. A bracket is grown from `x0` in steps starting at
/// `step`, and Newton steps that leave it are replaced by bisection.
pub(crate) fn newton_bracketed<F>(f: F, x0: f64, step: f64, tol: f64, what: &'static str) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (f0, _) = f(x0);
    if f0 == 0.0 {
        return Ok(x0);
    }
    if f0.is_nan() {
        return Err(Error::NoConvergence(what));
    }
    let (mut lo, mut hi);
    let mut delta = step;
    if f0 < 0.0 {
        lo = x0;
        hi = x0 + delta;
        loop {
            let (fh, _) = f(hi);
            if fh >= 0.0 || fh.is_nan() {
                break;
            }
            lo = hi;
            delta *= 2.0;
            hi += delta;
            if delta > 1e6 {
                return Err(Error::NoConvergence(what));
            }
        }
    } else {
        hi = x0;
        lo = x0 - delta;
        loop {
            let (fl, _) = f(lo);
            if fl <= 0.0 || fl.is_nan() {
                break;
            }
            hi = lo;
            delta *= 2.0;
            lo -= delta;
            if delta > 1e6 {
                return Err(Error::NoConvergence(what));
            }
        }
    }

    let mut x = x0.clamp(lo, hi);
    for _ in 0..300 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.is_nan() || fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - fx / dfx;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= tol * x.abs().max(1.0) || hi - lo <= tol * x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence(what))
}
