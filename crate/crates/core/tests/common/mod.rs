//! Shared statistical machinery for the integration suites: moment
//! helpers, chi-square and KS tests, an exact sign test, and brute-force
//! oracles for the table-count and logarithmic distributions.

#![allow(dead_code)]

use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64
}

/// Standard error of the mean.
pub fn stderr_of_mean(values: &[f64]) -> f64 {
    (sample_variance(values) / values.len() as f64).sqrt()
}

/// Histogram of non-negative integer draws over bins `0..max_bin`, with
/// everything `>= max_bin` pooled into the last bin.
pub fn histogram(draws: &[u64], max_bin: usize) -> Vec<u64> {
    let mut bins = vec![0u64; max_bin + 1];
    for &draw in draws {
        bins[(draw as usize).min(max_bin)] += 1;
    }
    bins
}

/// Upper critical value of the chi-square distribution.
pub fn chi_square_critical(dof: usize, alpha: f64) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("dof >= 1")
        .inverse_cdf(1.0 - alpha)
}

/// Goodness-of-fit chi-square statistic of observed bin counts against a
/// discrete law given as per-bin probabilities (same binning; the last
/// probability must absorb the tail). Adjacent bins are pooled until each
/// expected count reaches 5. Returns `(statistic, dof)`.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> (f64, usize) {
    assert_eq!(observed.len(), probs.len());
    let n: f64 = observed.iter().sum::<u64>() as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut acc_obs = 0.0;
    let mut acc_exp = 0.0;
    for (&obs, &prob) in observed.iter().zip(probs) {
        acc_obs += obs as f64;
        acc_exp += prob * n;
        if acc_exp >= 5.0 {
            cells.push((acc_obs, acc_exp));
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if acc_exp > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += acc_obs;
                last.1 += acc_exp;
            }
            None => cells.push((acc_obs, acc_exp)),
        }
    }
    assert!(cells.len() >= 2, "chi-square needs at least two pooled cells");
    let statistic = cells
        .iter()
        .map(|(obs, exp)| (obs - exp).powi(2) / exp)
        .sum();
    (statistic, cells.len() - 1)
}

/// One-sided goodness-of-fit decision at the given significance.
pub fn gof_matches(observed: &[u64], probs: &[f64], alpha: f64) -> bool {
    let (statistic, dof) = chi_square_gof(observed, probs);
    statistic < chi_square_critical(dof, alpha)
}

/// Two-sample chi-square on identically binned counts, pooling adjacent
/// bins until each pooled bin holds at least 5 combined counts. Returns
/// `(statistic, dof)`.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, usize) {
    assert_eq!(a.len(), b.len());
    let n_a: f64 = a.iter().sum::<u64>() as f64;
    let n_b: f64 = b.iter().sum::<u64>() as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&ca, &cb) in a.iter().zip(b) {
        acc.0 += ca as f64;
        acc.1 += cb as f64;
        if acc.0 + acc.1 >= 10.0 {
            cells.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => cells.push(acc),
        }
    }
    assert!(cells.len() >= 2, "chi-square needs at least two pooled cells");
    let mut statistic = 0.0;
    for (ca, cb) in &cells {
        let pooled = (ca + cb) / (n_a + n_b);
        let exp_a = n_a * pooled;
        let exp_b = n_b * pooled;
        statistic += (ca - exp_a).powi(2) / exp_a + (cb - exp_b).powi(2) / exp_b;
    }
    (statistic, cells.len() - 1)
}

/// Kolmogorov-Smirnov distance between an empirical sample and a
/// continuous CDF.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n);
        d = d.max((i + 1) as f64 / n - f);
    }
    d
}

/// Exact one-sided sign-test p-value: probability that a fair coin shows
/// at least `successes` heads in `trials` flips.
pub fn sign_test_p(trials: u64, successes: u64) -> f64 {
    if successes == 0 {
        return 1.0;
    }
    let binomial = Binomial::new(0.5, trials).expect("valid");
    binomial.sf(successes - 1)
}

/// Exact pmf of the table-count distribution with occupancy `n` and
/// concentration `r`, by brute-force enumeration of all 2^n joint
/// Bernoulli outcomes (success probability `r/(r+t-1)` for the `t`-th
/// draw). Index of the returned vector is the table count, 0..=n.
pub fn crt_enumeration_pmf(n: u32, r: f64) -> Vec<f64> {
    assert!(n <= 20, "enumeration explodes past 2^20 outcomes");
    let probs: Vec<f64> = (0..n).map(|t| r / (r + t as f64)).collect();
    let mut pmf = vec![0.0; n as usize + 1];
    for mask in 0u32..(1 << n) {
        let mut probability = 1.0;
        for (t, &p) in probs.iter().enumerate() {
            probability *= if mask & (1 << t) != 0 { p } else { 1.0 - p };
        }
        pmf[mask.count_ones() as usize] += probability;
    }
    pmf
}

/// Pmf of the logarithmic distribution: `-p^u / (u ln(1-p))` for `u >= 1`.
pub fn logarithmic_pmf(u: u64, p: f64) -> f64 {
    assert!(u >= 1);
    -p.powi(u as i32) / (u as f64 * (1.0 - p).ln())
}

/// Mean of the logarithmic distribution by truncated summation of
/// `u * pmf(u)` until the tail is negligible.
pub fn logarithmic_mean_oracle(p: f64) -> f64 {
    let mut total = 0.0;
    for u in 1..10_000 {
        let term = u as f64 * logarithmic_pmf(u, p);
        total += term;
        if u > 10 && term < 1e-14 {
            break;
        }
    }
    total
}

#[cfg(test)]
mod self_checks {
    // Unused when a consumer compiles without the libtest harness.
    #[allow(unused_imports)]
    use super::*;

    #[test]
    fn crt_enumeration_matches_hand_computed_case() {
        // n=3, r=1: Bernoulli probabilities 1, 1/2, 1/3.
        let pmf = crt_enumeration_pmf(3, 1.0);
        assert!((pmf[0] - 0.0).abs() < 1e-12);
        assert!((pmf[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((pmf[2] - 0.5).abs() < 1e-12);
        assert!((pmf[3] - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn logarithmic_mean_oracle_matches_closed_form() {
        // Closed form: -p / ((1-p) ln(1-p)).
        for p in [0.3_f64, 0.5, 0.9] {
            let closed = -p / ((1.0 - p) * (1.0 - p).ln());
            assert!((logarithmic_mean_oracle(p) - closed).abs() < 1e-9);
        }
    }

    #[test]
    fn sign_test_matches_direct_summation() {
        // P(X >= 8 | n=10) = (45 + 10 + 1) / 1024.
        assert!((sign_test_p(10, 8) - 56.0 / 1024.0).abs() < 1e-12);
        assert_eq!(sign_test_p(10, 0), 1.0);
    }
}
