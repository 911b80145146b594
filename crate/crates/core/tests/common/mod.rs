//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use netpeak::HouseholdDistribution;
use statrs::function::gamma::ln_gamma;

/// Upper tails `P(X > k)` for `k = 0..=n` of `Binomial(n, p)`, from a direct
/// pmf evaluation through log-gamma.
pub fn binomial_tails(n: u64, p: f64) -> Vec<f64> {
    let nf = n as f64;
    let ln_n = ln_gamma(nf + 1.0);
    let pmf: Vec<f64> = (0..=n)
        .map(|k| {
            let kf = k as f64;
            (ln_n - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0) + kf * p.ln() + (nf - kf) * (1.0 - p).ln()).exp()
        })
        .collect();
    tails(&pmf)
}

/// `tails[k] = sum of pmf[j] for j > k`, summed from the top.
pub fn tails(pmf: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; pmf.len()];
    let mut acc = 0.0;
    for k in (0..pmf.len()).rev() {
        out[k] = acc;
        acc += pmf[k];
    }
    out
}

/// Smallest `q >= floor` with `tails[q] < eps`.
pub fn quantile_from_tails(tails: &[f64], eps: f64, floor: u64) -> u64 {
    let q = tails.iter().position(|t| *t < eps).unwrap_or(tails.len() - 1) as u64;
    q.max(floor)
}

/// True when `got` equals the oracle, or both sit on a tail value that is
/// within floating noise of `eps`.
pub fn agrees(got: u64, expected: u64, tails: &[f64], eps: f64) -> bool {
    if got == expected {
        return true;
    }
    let (lo, hi) = (got.min(expected), got.max(expected));
    (lo..hi).all(|k| ((tails[k as usize] - eps) / eps).abs() < 1e-6)
}

pub fn binomial_oracle(n: u64, p: f64, eps: f64) -> (u64, Vec<f64>) {
    let t = binomial_tails(n, p);
    let floor = (n as f64 * p).floor() as u64;
    (quantile_from_tails(&t, eps, floor), t)
}

/// Distribution of total inhabitants in `n` homes by repeated one-home
/// convolution, indexed from zero inhabitants.
pub fn naive_inhabitants(dist: &HouseholdDistribution, n: u64) -> Vec<f64> {
    let min = dist.min_inhabitants() as usize;
    let mut one = vec![0.0; min];
    one.extend_from_slice(dist.probabilities());
    let mut acc = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; acc.len() + one.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in one.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc
}

/// Same distribution by enumerating every assignment of sizes to homes.
pub fn enumerated_inhabitants(dist: &HouseholdDistribution, n: u32) -> Vec<f64> {
    let min = dist.min_inhabitants() as usize;
    let probs = dist.probabilities();
    let k = probs.len();
    let max = n as usize * (min + k - 1);
    let mut out = vec![0.0; max + 1];
    let mut idx = vec![0usize; n as usize];
    loop {
        let total: usize = idx.iter().map(|i| min + i).sum();
        out[total] += idx.iter().map(|i| probs[*i]).product::<f64>();
        let mut d = 0;
        loop {
            if d == idx.len() {
                return out;
            }
            idx[d] += 1;
            if idx[d] < k {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

pub fn convolution_oracle(dist: &HouseholdDistribution, n: u64, eps: f64) -> (u64, Vec<f64>) {
    let t = tails(&naive_inhabitants(dist, n));
    let floor = (n as f64 * dist.mean()).floor() as u64;
    (quantile_from_tails(&t, eps, floor), t)
}

pub fn within(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target.abs()
}
