//! Mori's double-exponential change of variable `x(y) = exp(y/2 - e^{-y})`,
//! the transformed weight `psi_nu(y) = f_nu(x(y)) x'(y)`, and the trimming
//! bound that fixes where the infinite trapezoidal sum is cut.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{chi2_cdf, chi2_sf, exp_excess, ChiScaledDensityParams, DegreesOfFreedom};
use crate::ERROR_FLOOR;

/// Bracket searched for the mode of `psi_nu`.
const MODE_BRACKET: (f64, f64) = (-5.0, 5.0);
/// Window lengths considered by [`solve_window`].
const WINDOW_D_MIN: f64 = 1e-3;
const WINDOW_D_MAX: f64 = 200.0;

/// A point of the transformation together with its Jacobian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoriPoint {
    pub y: f64,
    pub x: f64,
    pub dxdy: f64,
}

/// `x(y)` and `dx/dy = x (1/2 + e^{-y})`. Far to the left `x` underflows to
/// zero; far to the right both overflow to infinity.
pub fn transform(y: f64) -> MoriPoint {
    let e = (-y).exp();
    let x = (0.5 * y - e).exp();
    let dxdy = if x == 0.0 { 0.0 } else { x * (0.5 + e) };
    MoriPoint { y, x, dxdy }
}

/// `ln x(y)^2 = y - 2 e^{-y}`.
fn ln_x_squared(y: f64) -> f64 {
    y - 2.0 * (-y).exp()
}

/// The transformed weight `psi_nu` for one `nu`, with the density constants
/// computed once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformedWeight {
    pub nu: DegreesOfFreedom,
    density: ChiScaledDensityParams,
    ln_peak: f64,
}

impl TransformedWeight {
    pub fn new(nu: DegreesOfFreedom) -> Self {
        let density = ChiScaledDensityParams::new(nu);
        Self { nu, density, ln_peak: density.peak.ln() }
    }

    pub fn density(&self) -> &ChiScaledDensityParams {
        &self.density
    }

    /// `psi_nu(y)`, zero wherever it underflows.
    ///
    /// With `t = ln x^2` and `k = nu/2`,
    /// `psi = f_nu(1) exp(-k (e^t - 1 - t)) (1/2 + e^{-y})`.
    pub fn psi(&self, y: f64) -> f64 {
        if y.is_nan() {
            return f64::NAN;
        }
        let e = (-y).exp();
        if e.is_infinite() || y.is_infinite() {
            return 0.0;
        }
        let t = y - 2.0 * e;
        let k = self.nu.half();
        self.density.peak * (-k * exp_excess(t)).exp() * (0.5 + e)
    }

    /// `ln psi_nu(y)`, finite over the whole range used by the window solver.
    pub fn ln_psi(&self, y: f64) -> f64 {
        let e = (-y).exp();
        if e.is_infinite() || y.is_infinite() {
            return f64::NEG_INFINITY;
        }
        let t = y - 2.0 * e;
        let k = self.nu.half();
        let jac = if y < -40.0 { -y + (0.5 * y.exp()).ln_1p() } else { (0.5 + e).ln() };
        self.ln_peak - k * exp_excess(t) + jac
    }

    /// `d/dy ln psi_nu(y)`, strictly decreasing through the mode.
    fn ln_psi_slope(&self, y: f64) -> f64 {
        let e = (-y).exp();
        let t = y - 2.0 * e;
        -self.nu.half() * t.exp_m1() * (1.0 + 2.0 * e) - e / (0.5 + e)
    }

    /// The maximizer `y*_nu` of `psi_nu`.
    ///
    /// Found by bisection on the sign of the log-derivative after a grid
    /// check that the sign changes exactly once in the search bracket.
    pub fn mode(&self) -> Result<f64> {
        let (lo, hi) = MODE_BRACKET;
        let steps = 400;
        let mut changes = 0;
        let mut prev = self.ln_psi_slope(lo) > 0.0;
        for i in 1..=steps {
            let y = lo + (hi - lo) * f64::from(i) / f64::from(steps);
            let up = self.ln_psi_slope(y) > 0.0;
            if up != prev {
                changes += 1;
                if up {
                    return Err(Error::NotUnimodal { nu: self.nu.get(), y });
                }
            }
            prev = up;
        }
        if changes != 1 {
            return Err(Error::NotUnimodal { nu: self.nu.get(), y: hi });
        }
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-13 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.ln_psi_slope(mid) > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }
}

/// `psi_nu(y) = f_nu(x(y)) dx/dy`.
pub fn psi(nu: DegreesOfFreedom, y: f64) -> f64 {
    TransformedWeight::new(nu).psi(y)
}

/// The maximizer of `psi_nu`.
pub fn psi_mode(nu: DegreesOfFreedom) -> Result<f64> {
    TransformedWeight::new(nu).mode()
}

/// Upper bound on the mass of `f_nu` lying outside `[x(y), x(y + d)]`:
/// `Q_nu(nu x(y)^2) + 1 - Q_nu(nu x(y + d)^2)`, the right tail taken directly.
pub fn trimming_bound(nu: DegreesOfFreedom, y: f64, d: f64) -> f64 {
    let n = nu.as_f64();
    let left = n * ln_x_squared(y).exp();
    let right = n * ln_x_squared(y + d).exp();
    let lower = if left.is_nan() { 0.0 } else { chi2_cdf(nu, left).unwrap_or(0.0) };
    let upper = if right.is_nan() { 0.0 } else { chi2_sf(nu, right).unwrap_or(0.0) };
    lower + upper
}

/// Where the trapezoidal sum is cut: nodes cover `[y_lo, y_lo + d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoriWindow {
    pub nu: DegreesOfFreedom,
    pub y_lo: f64,
    pub d: f64,
    /// `trimming_bound(nu, y_lo, d)`.
    pub bound: f64,
}

impl MoriWindow {
    pub fn new(nu: DegreesOfFreedom, y_lo: f64, d: f64) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Domain { what: "window length", value: d });
        }
        if !y_lo.is_finite() {
            return Err(Error::Domain { what: "window start", value: y_lo });
        }
        Ok(Self { nu, y_lo, d, bound: trimming_bound(nu, y_lo, d) })
    }

    pub fn y_hi(&self) -> f64 {
        self.y_lo + self.d
    }

    pub fn contains(&self, y: f64) -> bool {
        self.y_lo < y && y < self.y_hi()
    }
}

/// The `y` minimizing `trimming_bound(nu, y, d)` for fixed `d`. The
/// y-derivative of the bound is `psi(y) - psi(y + d)`, so the minimizer
/// balances the weight at both window edges. On `[y* - d, y*]` the balance
/// `ln psi(y) - ln psi(y + d)` is increasing and changes sign.
fn balanced_start(w: &TransformedWeight, mode: f64, d: f64) -> f64 {
    let phi = |y: f64| w.ln_psi(y) - w.ln_psi(y + d);
    let (mut a, mut b) = (mode - d, mode);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if phi(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Trimming target for accuracy `epsilon`: `1e-3 epsilon`, but never below
/// `2^-53`. A smaller trimmed mass cannot change a result near one in
/// double precision and only lengthens the window, coarsening the grid.
pub fn trimming_target(epsilon: f64) -> f64 {
    (1e-3 * epsilon).max(ERROR_FLOOR)
}

/// Chooses the window length `d` so that the minimized trimming bound
/// equals `target`, and `y_lo` as that minimizer. The returned bound never
/// exceeds `target` and is within a relative `1e-3` of it.
pub fn solve_window(nu: DegreesOfFreedom, target: f64) -> Result<MoriWindow> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Domain { what: "trimming target", value: target });
    }
    let w = TransformedWeight::new(nu);
    let mode = w.mode()?;
    let at = |d: f64| {
        let y = balanced_start(&w, mode, d);
        (y, trimming_bound(nu, y, d))
    };

    let (y_hi_d, bound_hi_d) = at(WINDOW_D_MAX);
    if bound_hi_d > target {
        return Err(Error::WindowUnreachable { target, max_len: WINDOW_D_MAX });
    }
    let (_, bound_lo_d) = at(WINDOW_D_MIN);
    if bound_lo_d <= target {
        let y = balanced_start(&w, mode, WINDOW_D_MIN);
        return MoriWindow::new(nu, y, WINDOW_D_MIN);
    }

    // bisection on ln d; the bound decreases in d
    let (mut a, mut b) = (WINDOW_D_MIN.ln(), WINDOW_D_MAX.ln());
    let mut best = (y_hi_d, WINDOW_D_MAX, bound_hi_d);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let d = mid.exp();
        let (y, bound) = at(d);
        if bound > target {
            a = mid;
        } else {
            b = mid;
            best = (y, d, bound);
            if bound >= target * (1.0 - 1e-6) {
                break;
            }
        }
    }
    let (y_lo, d, bound) = best;
    if bound < target * (1.0 - 1e-3) {
        return Err(Error::NoConvergence("solve_window"));
    }
    Ok(MoriWindow { nu, y_lo, d, bound })
}
