//! Memorising weak learner over a small explicit domain.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numeric::{mean_and_stderr, NeumaierSum};
use crate::smoothdist::Estimate;
use crate::{Error, Result};

/// Prediction on points absent from the sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieRule {
    Fixed(i8),
    /// A fresh fair ±1 per unseen point.
    Randomized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemorizingHypothesis {
    labels: Vec<Option<i8>>,
    tie: TieRule,
}

/// Memorises `(x, y)` pairs over the domain `0..domain`; later pairs overwrite earlier ones.
pub fn memorize(sample: &[(usize, i8)], domain: usize, tie: TieRule) -> Result<MemorizingHypothesis> {
    if let TieRule::Fixed(c) = tie {
        if c != 1 && c != -1 {
            return Err(Error::invalid(format!("tie value {c} is not ±1")));
        }
    }
    let mut labels = vec![None; domain];
    for &(x, y) in sample {
        let slot = labels
            .get_mut(x)
            .ok_or(Error::IndexOutOfRange { index: x as u64, bits: 0 })?;
        *slot = Some(y);
    }
    Ok(MemorizingHypothesis { labels, tie })
}

impl MemorizingHypothesis {
    pub fn domain(&self) -> usize {
        self.labels.len()
    }

    pub fn seen(&self, x: usize) -> bool {
        self.labels[x].is_some()
    }

    pub fn predict<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> i8 {
        match (self.labels[x], self.tie) {
            (Some(y), _) => y,
            (None, TieRule::Fixed(c)) => c,
            (None, TieRule::Randomized) => {
                if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    fn check(&self, target: &[i8], pmf: &[f64]) -> Result<()> {
        if target.len() != self.domain() || pmf.len() != self.domain() {
            return Err(Error::ArityMismatch {
                left: self.domain(),
                right: target.len().min(pmf.len()),
            });
        }
        Ok(())
    }

    /// `Σ_x D(x)·f(x)·E[h(x)]`, averaging over the tie randomness.
    pub fn expected_advantage(&self, target: &[i8], pmf: &[f64]) -> Result<f64> {
        self.check(target, pmf)?;
        let mut acc = NeumaierSum::new();
        for (x, (&f, &p)) in target.iter().zip(pmf).enumerate() {
            let mean = match (self.labels[x], self.tie) {
                (Some(y), _) => y as f64,
                (None, TieRule::Fixed(c)) => c as f64,
                (None, TieRule::Randomized) => 0.0,
            };
            acc.add(p * f as f64 * mean);
        }
        Ok(acc.value())
    }

    /// `Σ_{x seen} D(x)`.
    pub fn seen_mass(&self, pmf: &[f64]) -> f64 {
        let mut acc = NeumaierSum::new();
        for (label, &p) in self.labels.iter().zip(pmf) {
            if label.is_some() {
                acc.add(p);
            }
        }
        acc.value()
    }

    /// Advantage over `draws` independent realisations of the tie rule.
    pub fn monte_carlo_advantage<R: Rng + ?Sized>(&self, target: &[i8], pmf: &[f64], draws: u64, rng: &mut R) -> Result<Estimate> {
        self.check(target, pmf)?;
        let values: Vec<f64> = (0..draws)
            .map(|_| {
                let mut acc = NeumaierSum::new();
                for (x, (&f, &p)) in target.iter().zip(pmf).enumerate() {
                    acc.add(p * (f * self.predict(x, rng)) as f64);
                }
                acc.value()
            })
            .collect();
        let (mean, stderr) = mean_and_stderr(&values);
        Ok(Estimate {
            mean,
            stderr,
            samples: draws,
        })
    }
}
