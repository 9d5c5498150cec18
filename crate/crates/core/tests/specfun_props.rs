mod common;

use chiquad::specfun::*;
use common::{nu, simpson};
use proptest::prelude::*;

/// `P(chi2_nu <= t)` by Simpson after `u = s^2`, which removes the
/// endpoint singularity at `nu = 1`.
fn chi2_cdf_oracle(n: u32, t: f64) -> f64 {
    let k = nu(n);
    simpson(|s| if s == 0.0 { if n == 1 { (2.0 / std::f64::consts::PI).sqrt() } else { 0.0 } } else { 2.0 * s * chi2_pdf(k, s * s) }, 0.0, t.sqrt(), 4000)
}

#[test]
fn chi2_cdf_at_a_fixed_point() {
    let got = chi2_cdf(nu(5), 4.351).unwrap();
    assert!((got - chi2_cdf_oracle(5, 4.351)).abs() < 1e-10, "{got}");
}

#[test]
fn scaled_density_integrates_to_one() {
    for n in [1, 2, 3, 7, 20, 50, 400] {
        let p = ChiScaledDensityParams::new(nu(n));
        // the density is zero at x = 0 by convention; use the right limit
        let total = simpson(|x| chi_scaled_pdf(&p, x.max(1e-300)), 0.0, 8.0, 20_000);
        assert!((total - 1.0).abs() < 1e-10, "nu = {n}: {total}");
    }
}

proptest! {
    #[test]
    fn chi2_cdf_matches_simpson(n in 1u32..=20, t in 0.05f64..40.0) {
        let got = chi2_cdf(nu(n), t).unwrap();
        prop_assert!((got - chi2_cdf_oracle(n, t)).abs() < 1e-10);
    }

    #[test]
    fn chi2_cdf_is_monotone(n in 1u32..=200, t in 0.0f64..500.0, dt in 1e-6f64..10.0) {
        prop_assert!(chi2_cdf(nu(n), t).unwrap() <= chi2_cdf(nu(n), t + dt).unwrap());
    }

    #[test]
    fn chi2_tails_sum_to_one(n in 1u32..=1000, t in 0.0f64..3000.0) {
        let s = chi2_cdf(nu(n), t).unwrap() + chi2_sf(nu(n), t).unwrap();
        prop_assert!((s - 1.0).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn t_quantile_round_trip(n in 1u32..=1000, p in 1e-6f64..(1.0 - 1e-6)) {
        let t = t_quantile(nu(n), p).unwrap();
        prop_assert!((t_cdf(nu(n), t) - p).abs() <= 1e-11 * p.min(1.0 - p).max(1e-3));
    }

    #[test]
    fn chi2_quantile_round_trip(n in 1u32..=1000, p in 1e-6f64..(1.0 - 1e-6)) {
        let t = chi2_quantile(nu(n), p).unwrap();
        prop_assert!((chi2_cdf(nu(n), t).unwrap() - p).abs() <= 1e-11);
    }
}
