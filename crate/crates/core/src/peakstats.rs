//! High-confidence percentiles for small pools of homes and inhabitants.
//!
//! Territory-wide averages ("2% of subscribers are active", "2.18 inhabitants
//! per home") are only safe for very large pools. Near the leaves of the
//! network tree a port or card is shared by a few dozen homes, so equipment is
//! sized on the `1 - eps` percentile of the local count instead of its mean.
//!
//! Two exact quantiles are provided:
//!
//! * [`binomial_quantile`]: number of active members in a pool of `n` when each
//!   member is active with probability `p`.
//! * [`convolution_quantile`]: total inhabitants of `n` homes drawn from a
//!   [`HouseholdDistribution`].
//!
//! Both are cheap, but composing them over many pool sizes is not, so
//! [`fit_quantile_approx`] interpolates a three-parameter form
//! `max(a n + b n^c, n mean)` through three anchor pool sizes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest pool for which [`convolution_quantile`] runs the exact convolution.
pub const EXACT_CONVOLUTION_CAP: u64 = 4096;

/// Pool sizes used to anchor the three-point fit.
pub const DEFAULT_ANCHORS: [u64; 3] = [16, 128, 1024];

// Terms smaller than e^-NEGLIGIBLE relative to what they are compared with are dropped.
const NEGLIGIBLE: f64 = 45.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeakStatsError {
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("confidence level {0} is outside (0, 1)")]
    Epsilon(f64),
    #[error("invalid household distribution: {0}")]
    Distribution(String),
    #[error(
        "exact convolution over {requested} homes exceeds the cap of {cap}; \
         use the fitted quantile approximation instead"
    )]
    Capacity { requested: u64, cap: u64 },
    #[error("anchors must be strictly increasing and >= 1, got {0:?}")]
    Anchors([u64; 3]),
    #[error("no exponent in (0, 2) interpolates the anchors {anchors:?} with values {values:?}")]
    FitFailure { anchors: [u64; 3], values: [f64; 3] },
}

/// Tail mass `eps` left above a percentile: the percentile is `1 - eps`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ConfidenceLevel(f64);

impl ConfidenceLevel {
    pub const DEFAULT: ConfidenceLevel = ConfidenceLevel(1e-9);

    pub fn new(epsilon: f64) -> Result<Self, PeakStatsError> {
        if epsilon > 0.0 && epsilon < 1.0 {
            Ok(Self(epsilon))
        } else {
            Err(PeakStatsError::Epsilon(epsilon))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for ConfidenceLevel {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl TryFrom<f64> for ConfidenceLevel {
    type Error = PeakStatsError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<ConfidenceLevel> for f64 {
    fn from(value: ConfidenceLevel) -> Self {
        value.0
    }
}

/// Discrete distribution of inhabitants per home over a bounded support
/// `min_inhabitants ..= min_inhabitants + probabilities.len() - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HouseholdDistributionDoc", into = "HouseholdDistributionDoc")]
pub struct HouseholdDistribution {
    min_inhabitants: u32,
    probabilities: Vec<f64>,
    mean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HouseholdDistributionDoc {
    #[serde(default = "one")]
    min_inhabitants: u32,
    probabilities: Vec<f64>,
}

fn one() -> u32 {
    1
}

impl HouseholdDistribution {
    pub fn new(min_inhabitants: u32, probabilities: Vec<f64>) -> Result<Self, PeakStatsError> {
        let bad = |msg: String| Err(PeakStatsError::Distribution(msg));
        if min_inhabitants == 0 {
            return bad("inhabitant counts start at 1".into());
        }
        if probabilities.is_empty() {
            return bad("empty support".into());
        }
        if let Some(p) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return bad(format!("probability {p} is negative or not finite"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("probabilities sum to {total}, expected 1"));
        }
        let mean = probabilities
            .iter()
            .enumerate()
            .map(|(i, p)| (min_inhabitants as f64 + i as f64) * p)
            .sum();
        Ok(Self {
            min_inhabitants,
            probabilities,
            mean,
        })
    }

    /// Inhabitants per home in Metropolitan France (2019), the last bucket
    /// standing for six or more.
    pub fn france_2019() -> Self {
        Self::new(1, vec![0.369, 0.326, 0.135, 0.113, 0.041, 0.016])
            .expect("reference distribution is valid")
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn min_inhabitants(&self) -> u32 {
        self.min_inhabitants
    }

    pub fn max_inhabitants(&self) -> u32 {
        self.min_inhabitants + self.probabilities.len() as u32 - 1
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Probability of exactly `inhabitants` in one home.
    pub fn probability(&self, inhabitants: u32) -> f64 {
        inhabitants
            .checked_sub(self.min_inhabitants)
            .and_then(|i| self.probabilities.get(i as usize))
            .copied()
            .unwrap_or(0.0)
    }
}

impl Default for HouseholdDistribution {
    fn default() -> Self {
        Self::france_2019()
    }
}

impl TryFrom<HouseholdDistributionDoc> for HouseholdDistribution {
    type Error = PeakStatsError;

    fn try_from(doc: HouseholdDistributionDoc) -> Result<Self, Self::Error> {
        Self::new(doc.min_inhabitants, doc.probabilities)
    }
}

impl From<HouseholdDistribution> for HouseholdDistributionDoc {
    fn from(d: HouseholdDistribution) -> Self {
        Self {
            min_inhabitants: d.min_inhabitants,
            probabilities: d.probabilities,
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Smallest `q <= n` with `P(X > q) < eps` for `X ~ Binomial(n, p)`.
///
/// The pmf is walked outward from the mode through its successive ratios in
/// log space, so the cost grows with the standard deviation rather than with
/// `n`. The result never drops below `floor(n p)`.
pub fn binomial_quantile(n: u64, p: f64, eps: ConfidenceLevel) -> Result<u64, PeakStatsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PeakStatsError::Probability(p));
    }
    if n == 0 || p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(n);
    }

    let nf = n as f64;
    let log_odds = p.ln() - (-p).ln_1p();
    let log_eps = eps.get().ln();
    let floor_mean = ((nf * p).floor() as u64).min(n);
    let mode = (((nf + 1.0) * p).floor() as u64).min(n);

    // Log pmf relative to the mode, lower side collected in reverse.
    let mut below = Vec::new();
    let mut term = 0.0;
    let mut k = mode;
    while k > 0 {
        let kf = k as f64;
        term += (kf / (nf - kf + 1.0)).ln() - log_odds;
        k -= 1;
        below.push(term);
        if term < -NEGLIGIBLE {
            break;
        }
    }
    let lowest = k;

    let mut above = Vec::new();
    let mut term = 0.0;
    let mut k = mode;
    while k < n {
        let kf = k as f64;
        term += ((nf - kf) / (kf + 1.0)).ln() + log_odds;
        k += 1;
        above.push(term);
        if term < log_eps - NEGLIGIBLE {
            break;
        }
    }
    let highest = k;

    let terms: Vec<f64> = below
        .into_iter()
        .rev()
        .chain(std::iter::once(0.0))
        .chain(above)
        .collect();
    let log_total = terms.iter().fold(f64::NEG_INFINITY, |acc, &t| log_add(acc, t));
    let term_at = |k: u64| terms[(k - lowest) as usize];

    // Invariant: log_tail = ln P(X > q) (unnormalised).
    let mut q = highest;
    let mut log_tail = f64::NEG_INFINITY;
    while q > floor_mean && q > lowest {
        let widened = log_add(log_tail, term_at(q));
        if widened - log_total >= log_eps {
            break;
        }
        log_tail = widened;
        q -= 1;
    }
    Ok(q.max(floor_mean))
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

/// Probability vector of the total inhabitants of `n` homes, starting at
/// `n * min_inhabitants`. Computed by square-and-multiply on the single-home
/// vector.
pub fn convolution_power(dist: &HouseholdDistribution, n: u64) -> Vec<f64> {
    let mut result = vec![1.0];
    let mut power = dist.probabilities.clone();
    let mut remaining = n;
    while remaining > 0 {
        if remaining & 1 == 1 {
            result = convolve(&result, &power);
        }
        remaining >>= 1;
        if remaining > 0 {
            power = convolve(&power, &power);
        }
    }
    result
}

/// Exact `1 - eps` percentile of the total inhabitants of `n` independent
/// homes: the smallest `q` with `P(sum > q) < eps`.
pub fn convolution_quantile(
    dist: &HouseholdDistribution,
    n: u64,
    eps: ConfidenceLevel,
) -> Result<u64, PeakStatsError> {
    if n > EXACT_CONVOLUTION_CAP {
        return Err(PeakStatsError::Capacity {
            requested: n,
            cap: EXACT_CONVOLUTION_CAP,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    let offset = n * dist.min_inhabitants as u64;
    let pmf = convolution_power(dist, n);
    let floor_mean = ((n as f64 * dist.mean).floor() as u64).saturating_sub(offset);

    let mut j = pmf.len() as u64 - 1;
    let mut tail = 0.0;
    while j > floor_mean {
        let widened = tail + pmf[j as usize];
        if widened >= eps.get() {
            break;
        }
        tail = widened;
        j -= 1;
    }
    Ok(offset + j)
}

/// Coefficients of `max(a n + b n^c, n mean)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileApprox {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mean: f64,
}

impl QuantileApprox {
    pub fn eval(&self, n: f64) -> f64 {
        if n <= 0.0 {
            return 0.0;
        }
        (self.a * n + self.b * n.powf(self.c)).max(n * self.mean)
    }

    /// Identically zero, for inactive terms.
    pub fn zero() -> Self {
        Self {
            a: 0.0,
            b: 0.0,
            c: 1.0,
            mean: 0.0,
        }
    }
}

/// Interpolate `a n + b n^c` through `exact` at the three `anchors`.
///
/// `a` and `b` are eliminated linearly from the first two anchor equations, which
/// leaves a scalar residual in `c` at the third anchor; that residual is
/// bracketed on each side of its pole at `c = 1` and bisected.
pub fn fit_quantile_approx<F>(
    mut exact: F,
    anchors: [u64; 3],
    mean: f64,
) -> Result<QuantileApprox, PeakStatsError>
where
    F: FnMut(u64) -> Result<f64, PeakStatsError>,
{
    if anchors[0] < 1 || anchors[0] >= anchors[1] || anchors[1] >= anchors[2] {
        return Err(PeakStatsError::Anchors(anchors));
    }
    let values = [exact(anchors[0])?, exact(anchors[1])?, exact(anchors[2])?];
    let [n1, n2, n3] = anchors.map(|n| n as f64);
    let [y1, y2, y3] = values;

    let solve = |c: f64| -> Option<(f64, f64)> {
        let (p1, p2) = (n1.powf(c), n2.powf(c));
        let det = n1 * p2 - n2 * p1;
        if det.abs() < 1e-300 {
            return None;
        }
        Some(((y1 * p2 - y2 * p1) / det, (n1 * y2 - n2 * y1) / det))
    };
    let residual = |c: f64| solve(c).map(|(a, b)| a * n3 + b * n3.powf(c) - y3);
    let tolerance = 1e-10_f64.max(1e-13 * y3.abs());
    let finish = |c: f64| {
        let (a, b) = solve(c).expect("bracketed exponent is away from the pole");
        QuantileApprox { a, b, c, mean }
    };

    const STEPS: usize = 256;
    for (lo, hi) in [(1e-4, 1.0 - 1e-4), (1.0 + 1e-4, 2.0 - 1e-4)] {
        let grid = |i: usize| lo + (hi - lo) * i as f64 / STEPS as f64;
        let mut prev_c = grid(0);
        let Some(mut prev_r) = residual(prev_c) else {
            continue;
        };
        if prev_r.abs() <= tolerance {
            return Ok(finish(prev_c));
        }
        for i in 1..=STEPS {
            let c = grid(i);
            let Some(r) = residual(c) else { continue };
            if r.abs() <= tolerance {
                return Ok(finish(c));
            }
            if r.signum() != prev_r.signum() {
                let (mut left, mut right, mut r_left) = (prev_c, c, prev_r);
                for _ in 0..200 {
                    let mid = 0.5 * (left + right);
                    let r_mid = residual(mid).unwrap_or(f64::NAN);
                    if r_mid.abs() <= tolerance || right - left < 1e-15 {
                        return Ok(finish(mid));
                    }
                    if r_mid.signum() == r_left.signum() {
                        left = mid;
                        r_left = r_mid;
                    } else {
                        right = mid;
                    }
                }
                return Ok(finish(0.5 * (left + right)));
            }
            prev_c = c;
            prev_r = r;
        }
    }
    Err(PeakStatsError::FitFailure { anchors, values })
}
