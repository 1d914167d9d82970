//! Small numeric helpers shared by the experiment code: compensated summation,
//! confidence intervals and the seeded substream scheme.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Beta, ContinuousCDF};

/// Random stream type used by every sampler in the crate.
pub type Stream = ChaCha8Rng;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Derives an independent stream for `(seed, tag, index)`.
///
/// The root generator is seeded from `seed`; the ChaCha stream id is
/// `tag << 40 | index`, so indices below 2^40 never collide across tags.
/// Serial and parallel consumers see identical draws for the same triple.
pub fn substream(seed: u64, tag: u64, index: u64) -> Stream {
    debug_assert!(index < 1 << 40);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 40) | index);
    rng
}

/// Sample mean and standard error of the mean. Empty input gives `(0, 0)`.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

pub fn sample_std_dev(values: &[f64]) -> f64 {
    let (_, se) = mean_and_stderr(values);
    se * (values.len() as f64).sqrt()
}

/// Linear-interpolated quantile of an already sorted slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) / n) + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Two-sided Clopper–Pearson interval at the given confidence level.
pub fn clopper_pearson(hits: u64, trials: u64, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let tail = (1.0 - confidence) / 2.0;
    let (x, n) = (hits as f64, trials as f64);
    let lower = if hits == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0).map(|b| b.inverse_cdf(tail)).unwrap_or(0.0)
    };
    let upper = if hits == trials {
        1.0
    } else if hits == 0 {
        // closed form of the Beta(1, n) quantile
        1.0 - tail.powf(1.0 / n)
    } else {
        Beta::new(x + 1.0, n - x).map(|b| b.inverse_cdf(1.0 - tail)).unwrap_or(1.0)
    };
    (lower, upper)
}

/// `P[Bin(trials, 1/2) = j]` for every `j`, built by the multiplicative recurrence.
pub fn fair_binomial_pmf(trials: usize) -> Vec<f64> {
    let mut pmf = Vec::with_capacity(trials + 1);
    let mut c = 1.0f64;
    for j in 0..=trials {
        if j > 0 {
            c = c * (trials + 1 - j) as f64 / j as f64;
        }
        pmf.push(c);
    }
    let scale = 0.5f64.powi(trials as i32);
    pmf.iter_mut().for_each(|p| *p *= scale);
    pmf
}
