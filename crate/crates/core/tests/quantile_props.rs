mod common;

use common::{agrees, binomial_oracle, convolution_oracle, enumerated_inhabitants, naive_inhabitants, within};
use netpeak::peakstats::{
    binomial_quantile, convolution_power, convolution_quantile, fit_quantile_approx, DEFAULT_ANCHORS,
};
use netpeak::scenario::fit_viewer_quantile;
use netpeak::{ConfidenceLevel, HouseholdDistribution};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn eps(e: f64) -> ConfidenceLevel {
    ConfidenceLevel::new(e).unwrap()
}

fn exponent() -> impl Strategy<Value = f64> {
    (-12.0..-1.0f64).prop_map(|x| 10f64.powf(x))
}

fn distribution() -> impl Strategy<Value = HouseholdDistribution> {
    (1u32..4, prop::collection::vec(0.01..1.0f64, 1..6)).prop_map(|(min, w)| {
        let total: f64 = w.iter().sum();
        HouseholdDistribution::new(min, w.iter().map(|x| x / total).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn binomial_monotone_in_n(n in 0u64..5000, p in 0.0..1.0f64, e in exponent()) {
        let a = binomial_quantile(n, p, eps(e)).unwrap();
        let b = binomial_quantile(n + 1, p, eps(e)).unwrap();
        prop_assert!(a <= b, "q({n}) = {a} > q({}) = {b}", n + 1);
    }

    #[test]
    fn binomial_monotone_in_p(n in 1u64..5000, p in 0.0..0.99f64, dp in 0.0..0.01f64, e in exponent()) {
        let a = binomial_quantile(n, p, eps(e)).unwrap();
        let b = binomial_quantile(n, p + dp, eps(e)).unwrap();
        prop_assert!(a <= b);
    }

    #[test]
    fn binomial_monotone_in_eps(n in 1u64..5000, p in 0.0..1.0f64, e in exponent(), shrink in 1.0..100.0f64) {
        let loose = binomial_quantile(n, p, eps(e)).unwrap();
        let tight = binomial_quantile(n, p, eps(e / shrink)).unwrap();
        prop_assert!(loose <= tight);
    }

    #[test]
    fn binomial_bounds(n in 0u64..100_000_000, p in 0.0..1.0f64, e in exponent()) {
        let q = binomial_quantile(n, p, eps(e)).unwrap();
        prop_assert!(q >= (n as f64 * p).floor() as u64);
        prop_assert!(q <= n);
    }

    #[test]
    fn binomial_matches_direct_summation(n in 1u64..1500, p in 0.001..0.999f64, e in exponent()) {
        let got = binomial_quantile(n, p, eps(e)).unwrap();
        let (expected, tails) = binomial_oracle(n, p, e);
        prop_assert!(agrees(got, expected, &tails, e), "n={n} p={p} eps={e}: {got} vs {expected}");
    }

    #[test]
    fn convolution_matches_naive(dist in distribution(), n in 0u64..=64, e in exponent()) {
        let got = convolution_quantile(&dist, n, eps(e)).unwrap();
        let (expected, tails) = convolution_oracle(&dist, n, e);
        prop_assert!(agrees(got, expected, &tails, e), "n={n} eps={e}: {got} vs {expected}");
    }

    #[test]
    fn convolution_monotone_in_n(dist in distribution(), n in 0u64..200, e in exponent()) {
        let a = convolution_quantile(&dist, n, eps(e)).unwrap();
        let b = convolution_quantile(&dist, n + 1, eps(e)).unwrap();
        prop_assert!(a <= b);
        prop_assert!(a >= (n as f64 * dist.mean()).floor() as u64);
    }
}

#[test]
fn convolution_power_matches_enumeration() {
    let dist = HouseholdDistribution::france_2019();
    for n in 0..=4u32 {
        let fast = convolution_power(&dist, n as u64);
        let slow = enumerated_inhabitants(&dist, n);
        let offset = n as usize * dist.min_inhabitants() as usize;
        for (k, p) in slow.iter().enumerate() {
            let f = if k < offset { 0.0 } else { fast.get(k - offset).copied().unwrap_or(0.0) };
            assert!((f - p).abs() < 1e-15, "n={n} k={k}: {f} vs {p}");
        }
    }
}

#[test]
fn naive_and_enumerated_agree() {
    let dist = HouseholdDistribution::new(2, vec![0.5, 0.25, 0.25]).unwrap();
    let a = naive_inhabitants(&dist, 5);
    let b = enumerated_inhabitants(&dist, 5);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-15);
    }
}

#[test]
fn three_percent_of_sixty_four() {
    let q = binomial_quantile(64, 0.03, ConfidenceLevel::DEFAULT).unwrap();
    let ratio = q as f64 / 64.0;
    assert!((0.20..=0.24).contains(&ratio), "{q}");
}

#[test]
fn large_n_close_to_gaussian_tail() {
    let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - 1e-9);
    for (n, p) in [(1_000_000u64, 0.02), (30_450_000, 0.02), (66_000_000, 0.2)] {
        let q = binomial_quantile(n, p, ConfidenceLevel::DEFAULT).unwrap() as f64;
        let mean = n as f64 * p;
        let sd = (mean * (1.0 - p)).sqrt();
        let gauss = mean + z * sd;
        // The exact tail is right skewed, so it sits slightly above the normal one.
        assert!(q >= gauss - 1.0, "n={n}: {q} vs {gauss}");
        assert!(q - gauss < 0.1 * z * sd, "n={n}: {q} vs {gauss}");
    }
}

#[test]
fn viewer_fit_error_off_anchor() {
    let dist = HouseholdDistribution::france_2019();
    let e = ConfidenceLevel::DEFAULT;
    for s_v in [0.05, 0.1, 0.2, 0.3, 0.5] {
        let fit = fit_viewer_quantile(&dist, s_v, e).unwrap();
        for n in [32u64, 256, 512] {
            let inhabitants = convolution_quantile(&dist, n, e).unwrap();
            let exact = binomial_quantile(inhabitants, s_v, e).unwrap() as f64;
            let approx = fit.eval(n as f64);
            assert!(within(approx, exact, 0.03), "s_v={s_v} n={n}: {approx} vs {exact}");
        }
    }
}

#[test]
fn fit_reproduces_anchors() {
    let dist = HouseholdDistribution::france_2019();
    let e = ConfidenceLevel::DEFAULT;
    let exact = |n: u64| {
        let i = convolution_quantile(&dist, n, e).unwrap();
        binomial_quantile(i, 0.2, e).unwrap() as f64
    };
    let fit = fit_quantile_approx(|n| Ok(exact(n)), DEFAULT_ANCHORS, 0.2 * dist.mean()).unwrap();
    for n in DEFAULT_ANCHORS {
        assert!(within(fit.eval(n as f64), exact(n), 1e-9));
    }
}
