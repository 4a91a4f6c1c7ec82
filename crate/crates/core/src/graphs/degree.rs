use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math;

/// Default support cap for truncated unbounded laws.
pub const DEFAULT_SUPPORT_CAP: usize = 64;

/// Probability distribution on `0..=cap`, stored as a dense pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    mean: f64,
}

impl DegreeDistribution {
    /// `pmf[k]` is the mass on degree `k`. Must be non-negative and sum to 1
    /// within `1e-12`; the last entry must be non-zero.
    pub fn from_pmf(pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(p) = pmf.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("invalid mass {p}")));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        let mut pmf = pmf;
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let mean = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        Ok(DegreeDistribution { pmf, cdf, mean })
    }

    /// Normalizes arbitrary non-negative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidDistribution("weights must be non-negative with positive sum".into()));
        }
        Self::from_pmf(weights.iter().map(|w| w / total).collect())
    }

    pub fn point_mass(k: usize) -> Self {
        let mut pmf = vec![0.0; k + 1];
        pmf[k] = 1.0;
        Self::from_pmf(pmf).expect("point mass is valid")
    }

    /// Poisson(`mean`) conditioned on `0..=cap`.
    pub fn poisson(mean: f64, cap: usize) -> Result<Self> {
        if !(mean >= 0.0 && mean.is_finite()) {
            return Err(Error::InvalidDistribution(format!("Poisson mean {mean}")));
        }
        let mut w = Vec::with_capacity(cap + 1);
        let mut log_p = -mean;
        for k in 0..=cap {
            if k > 0 {
                log_p += math::ln(mean) - math::ln(k as f64);
            }
            w.push(if mean == 0.0 { if k == 0 { 1.0 } else { 0.0 } } else { math::exp(log_p) });
        }
        Self::from_weights(&w)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn max_degree(&self) -> usize {
        self.pmf.len() - 1
    }

    /// Size-biased offspring law `k -> (k+1) p_{k+1} / mean`. `None` when the
    /// mean is zero.
    pub fn size_biased(&self) -> Option<DegreeDistribution> {
        if self.mean <= 0.0 {
            return None;
        }
        let w: Vec<f64> = (0..self.pmf.len().saturating_sub(1).max(1))
            .map(|k| (k + 1) as f64 * self.prob(k + 1) / self.mean)
            .collect();
        DegreeDistribution::from_weights(&w).ok()
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.gen::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf.partition_point(|&c| c <= u).min(self.pmf.len() - 1)
    }

    /// `E[D; top eps fraction]`: the mean of `D` restricted to its upper
    /// `eps`-quantile, with the boundary atom split so exactly `eps` mass is
    /// taken.
    pub fn upper_tail_moment(&self, eps: f64) -> f64 {
        let mut remaining = eps;
        let mut acc = 0.0;
        for k in (0..self.pmf.len()).rev() {
            if remaining <= 0.0 {
                break;
            }
            let take = self.pmf[k].min(remaining);
            acc += take * k as f64;
            remaining -= take;
        }
        acc
    }
}
