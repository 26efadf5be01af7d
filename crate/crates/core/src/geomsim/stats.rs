//! Mergeable running moments and Monte Carlo estimates.

use crate::error::{Error, Result};

/// Welford accumulator of count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combines two accumulators as if all samples had been pushed into one.
    pub fn merge(&self, other: &Self) -> Self {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        Self { n, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Mean of independent trial values with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl SimEstimate {
    pub fn from_stats(stats: &RunningStats) -> Result<Self> {
        if stats.count() < 2 {
            return Err(Error::TooFewTrials {
                got: stats.count() as usize,
                min: 2,
            });
        }
        Ok(Self {
            mean: stats.mean(),
            stderr: stats.stderr(),
            trials: stats.count() as usize,
        })
    }

    pub fn from_trials(values: &[f64]) -> Result<Self> {
        Self::from_stats(&values.iter().copied().collect())
    }

    /// Ratio of trial means `Σa/Σb` with a delta-method standard error.
    pub fn ratio(num: &[f64], den: &[f64]) -> Result<Self> {
        let a = Self::from_trials(num)?;
        let b = Self::from_trials(den)?;
        let r = a.mean / b.mean;
        let t = num.len() as f64;
        let cov = num
            .iter()
            .zip(den)
            .map(|(x, y)| (x - a.mean) * (y - b.mean))
            .sum::<f64>()
            / (t - 1.0);
        let var_a = a.stderr * a.stderr * t;
        let var_b = b.stderr * b.stderr * t;
        let var = (var_a - 2.0 * r * cov + r * r * var_b) / (b.mean * b.mean * t);
        Ok(Self {
            mean: r,
            stderr: var.max(0.0).sqrt(),
            trials: num.len(),
        })
    }

    /// Product of two independent estimates with first-order error propagation.
    pub fn product(&self, other: &Self) -> Self {
        let mean = self.mean * other.mean;
        let stderr = ((self.stderr * other.mean).powi(2) + (other.stderr * self.mean).powi(2)).sqrt();
        Self {
            mean,
            stderr,
            trials: self.trials.min(other.trials),
        }
    }

    /// Absolute deviation from `target` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }
}

/// Asymptotic Kolmogorov p-value of a one-sample KS statistic `d` from `n`
/// samples, with the usual finite-sample correction of the argument.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS statistic of `samples` against the continuous `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}
