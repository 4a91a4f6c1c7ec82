//! Interval estimates and the handful of test statistics the estimators need.
//!
//! Proportions use the Wilson score interval
//! `(p + z²/2n ± z sqrt(p(1-p)/n + z²/4n²)) / (1 + z²/n)`; means use the
//! Student-t interval `mean ± t_{n-1} · s/sqrt(n)`.

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use cplab_core::rng::seeded;

pub const DEFAULT_LEVEL: f64 = 0.95;

/// Monte Carlo estimate with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub n_censored: usize,
    pub ci_level: f64,
    pub ci: (f64, f64),
}

fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p)
}

impl Estimate {
    /// Exact value with no sampling error.
    pub fn exact(value: f64) -> Self {
        Estimate { mean: value, stderr: 0.0, n_samples: 0, n_censored: 0, ci_level: 1.0, ci: (value, value) }
    }

    /// Wilson interval for `successes` out of `n`.
    pub fn proportion(successes: usize, n: usize, n_censored: usize, level: f64) -> Self {
        assert!(n >= 1, "proportion of zero trials");
        let nf = n as f64;
        let p = successes as f64 / nf;
        let z = normal_quantile(0.5 + level / 2.0);
        let z2 = z * z;
        let denom = 1.0 + z2 / nf;
        let centre = (p + z2 / (2.0 * nf)) / denom;
        let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
        let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
        let hi = if successes == n { 1.0 } else { (centre + half).min(1.0) };
        Estimate {
            mean: p,
            stderr: (p * (1.0 - p) / nf).sqrt(),
            n_samples: n,
            n_censored,
            ci_level: level,
            ci: (lo.min(p), hi.max(p)),
        }
    }

    /// Student-t interval for the mean of `values`.
    pub fn mean(values: &[f64], n_censored: usize, level: f64) -> Self {
        assert!(!values.is_empty(), "mean of no values");
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Estimate { mean, stderr: 0.0, n_samples: 1, n_censored, ci_level: level, ci: (mean, mean) };
        }
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let stderr = (var / n as f64).sqrt();
        let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("dof >= 1").inverse_cdf(0.5 + level / 2.0);
        Estimate { mean, stderr, n_samples: n, n_censored, ci_level: level, ci: (mean - t * stderr, mean + t * stderr) }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn within_se(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

/// `|a - b| <= k sqrt(se_a² + se_b²)`.
pub fn agree_within(a: &Estimate, b: &Estimate, k: f64) -> bool {
    (a.mean - b.mean).abs() <= k * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt()
}

/// Sample quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], level: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * level;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Kolmogorov distribution tail `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let sq = ne.sqrt();
    (d, kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d))
}

/// One-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sq = n.sqrt();
    (d, kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d))
}

/// Percentile bootstrap: returns the bootstrap replicates of `stat`, sorted.
pub fn bootstrap<F>(groups: &[Vec<f64>], reps: usize, seed: u64, stat: F) -> Vec<f64>
where
    F: Fn(&[Vec<f64>]) -> f64,
{
    let mut rng = seeded(seed);
    let mut out: Vec<f64> = (0..reps)
        .map(|_| {
            let resampled: Vec<Vec<f64>> = groups
                .iter()
                .map(|g| (0..g.len()).map(|_| g[rng.gen_range(0..g.len())]).collect())
                .collect();
            stat(&resampled)
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Equal-tailed percentile interval from sorted replicates.
pub fn percentile_interval(sorted: &[f64], level: f64) -> (f64, f64) {
    let a = (1.0 - level) / 2.0;
    (quantile(sorted, a), quantile(sorted, 1.0 - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        let e = Estimate::proportion(50, 100, 0, 0.95);
        assert!((e.ci.0 - 0.4038).abs() < 5e-4 && (e.ci.1 - 0.5962).abs() < 5e-4, "{:?}", e.ci);
        assert_eq!(Estimate::proportion(0, 40, 0, 0.95).ci.0, 0.0);
        assert_eq!(Estimate::proportion(40, 40, 0, 0.95).ci.1, 1.0);
        assert_eq!(Estimate::proportion(0, 40, 0, 0.95).stderr, 0.0);
    }

    #[test]
    fn t_interval_contains_mean() {
        let e = Estimate::mean(&[1.0, 2.0, 3.0, 4.0], 1, 0.95);
        assert_eq!(e.mean, 2.5);
        // s = 1.29099, se = 0.645497, t_{3, 0.975} = 3.182446
        assert!((e.ci.1 - (2.5 + 3.182446 * 0.645497)).abs() < 1e-4);
        assert_eq!(e.n_censored, 1);
        assert_eq!(Estimate::mean(&[7.0], 0, 0.95).ci, (7.0, 7.0));
    }

    #[test]
    fn quantiles_and_slope() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.125), 1.5);
        assert_eq!(median(&[3.0, 1.0, 2.0, 10.0]), 2.5);
        assert!((ls_slope(&[1.0, 2.0, 3.0], &[2.0, 4.1, 6.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ks_extremes() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..100).map(|i| i as f64 + 1000.0).collect();
        let (d, p) = ks_two_sample(&a, &b);
        assert_eq!(d, 1.0);
        assert!(p < 1e-10);
        let (d, p) = ks_two_sample(&a, &a);
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
        let u: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_one_sample(&u, |x| x).1 > 0.99);
    }
}
