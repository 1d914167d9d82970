//! κ-smooth distributions over block inputs.
//!
//! A distribution on `{±1}^{n·k}` is κ-smooth when no point has mass above
//! `κ/2^{n·k}`. Three representations are supported: uniform, an explicit pmf,
//! and uniform conditioned on a named predicate (sampled by rejection).

use std::io::{Read, Write};
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::junta::{read_pmf_csv, write_pmf_csv, PMF_TOLERANCE};
use crate::lift::{BlockInput, LiftedFunction, Outer, EXACT_DOMAIN_BITS};
use crate::numeric::{compensated_sum, fair_binomial_pmf, mean_and_stderr, substream, wilson_interval, NeumaierSum, Stream};
use crate::{DensityDistribution, Error, Result, MAX_ARITY};

/// Smallest acceptance probability a filtered distribution may have.
pub const MIN_ACCEPTANCE: f64 = 1e-4;
/// Attempts per rejection-sampled point before giving up.
pub const REJECTION_CAP: u64 = 1_000_000;
/// Normal quantile for the Wilson interval on estimated acceptance.
pub const ACCEPTANCE_Z: f64 = 3.0;

const ACCEPTANCE_TAG: u64 = 0xa0;
const EXPECTATION_TAG: u64 = 0xa1;
const EXPECTATION_CHUNK: u64 = 4096;

/// Named built-in events over block inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// `F(X) ≠ f_block(X^{(block)})`.
    AntiBlock { lift: Arc<LiftedFunction>, block: usize },
    /// At least `min_plus` of the inner values `f_i(X^{(i)})` equal `+1`.
    MajorityTilt { lift: Arc<LiftedFunction>, min_plus: u32 },
    /// `X^{(block)} & mask == value`.
    MaskCondition { block: usize, mask: u64, value: u64 },
}

impl Predicate {
    pub fn name(&self) -> String {
        match self {
            Predicate::AntiBlock { block, .. } => format!("anti-block[{block}]"),
            Predicate::MajorityTilt { min_plus, .. } => format!("majority-tilt[{min_plus}]"),
            Predicate::MaskCondition { block, mask, value } => {
                format!("mask[{block}:{mask:#x}={value:#x}]")
            }
        }
    }

    pub fn accepts(&self, x: &BlockInput) -> bool {
        match self {
            Predicate::AntiBlock { lift, block } => {
                let y = lift.inner_values(x);
                let first = if (y >> block) & 1 == 1 { 1 } else { -1 };
                lift.outer().eval_mask(y) != first
            }
            Predicate::MajorityTilt { lift, min_plus } => lift.inner_values(x).count_ones() >= *min_plus,
            Predicate::MaskCondition { block, mask, value } => x.block(*block) & mask == *value,
        }
    }

    fn check_shape(&self, n: u32, k: u32) -> Result<()> {
        let (lift_shape, block) = match self {
            Predicate::AntiBlock { lift, block } => (Some(lift), *block),
            Predicate::MajorityTilt { lift, .. } => (Some(lift), 0),
            Predicate::MaskCondition { block, mask, value } => {
                if (n < 64 && mask >> n != 0) || value & !mask != 0 {
                    return Err(Error::invalid(format!("mask {mask:#x} / value {value:#x} invalid for {n}-bit blocks")));
                }
                (None, *block)
            }
        };
        if let Some(lift) = lift_shape {
            if lift.block_bits() != n || lift.block_count() != k {
                return Err(Error::invalid("predicate lift does not match the distribution shape"));
            }
        }
        if block >= k as usize {
            return Err(Error::invalid(format!("block {block} out of range for {k} blocks")));
        }
        Ok(())
    }

    /// Acceptance probability under the uniform distribution, when it has a closed
    /// form that avoids enumerating block inputs.
    ///
    /// Lift predicates depend on `X` only through the inner values, which are
    /// uniform on `{±1}^k` because every inner function is balanced.
    fn pushforward_probability(&self) -> Option<f64> {
        match self {
            Predicate::MaskCondition { mask, .. } => Some(0.5f64.powi(mask.count_ones() as i32)),
            Predicate::MajorityTilt { lift, min_plus } => {
                let k = lift.block_count() as usize;
                let pmf = fair_binomial_pmf(k);
                Some(compensated_sum(pmf.iter().skip(*min_plus as usize).copied()))
            }
            Predicate::AntiBlock { lift, block } => match lift.outer() {
                Outer::Majority { k } => {
                    // with y_block fixed, the vote flips iff the other k−1 votes carry it
                    let k = *k as i64;
                    let pmf = fair_binomial_pmf((k - 1) as usize);
                    let p = pmf
                        .iter()
                        .enumerate()
                        .filter(|(others, _)| {
                            let plus_total = *others as i64 + 1;
                            crate::boolfn::sign_int(2 * plus_total - k) != 1
                        })
                        .map(|(_, p)| *p);
                    Some(compensated_sum(p))
                }
                Outer::Table(g) if g.arity() <= MAX_ARITY => {
                    let hits = (0..g.len()).filter(|&y| {
                        let first = if (y >> block) & 1 == 1 { 1 } else { -1 };
                        g.get(y) != first
                    });
                    Some(hits.count() as f64 / g.len() as f64)
                }
                Outer::Table(_) => None,
            },
        }
    }
}

/// How the acceptance probability of a filtered distribution is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Acceptance {
    Exact(f64),
    Estimated {
        p_hat: f64,
        lower: f64,
        upper: f64,
        samples: u64,
        hits: u64,
    },
}

impl Acceptance {
    pub fn point(&self) -> f64 {
        match self {
            Acceptance::Exact(p) => *p,
            Acceptance::Estimated { p_hat, .. } => *p_hat,
        }
    }

    /// The value used for κ: exact `p`, or the interval's lower end.
    pub fn conservative(&self) -> f64 {
        match self {
            Acceptance::Exact(p) => *p,
            Acceptance::Estimated { lower, .. } => *lower,
        }
    }
}

/// How to certify the acceptance probability when building a filtered distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certification {
    /// Closed form or enumeration; fails when neither is available.
    Exact,
    Estimate { samples: u64, seed: u64 },
    /// Exact when possible, otherwise the estimate.
    Auto { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    Uniform,
    Explicit { pmf: Arc<Vec<f64>>, cdf: Arc<Vec<f64>> },
    Filtered { predicate: Predicate, acceptance: Acceptance },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothDistribution {
    n: u32,
    k: u32,
    variant: Variant,
    kappa: f64,
}

/// Outcome of [`SmoothDistribution::smoothness_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SmoothnessCheck {
    Exact { observed: f64, declared: f64, pass: bool },
    /// Only an interval `[1/upper, 1/lower]` for `κ = 1/p` is known.
    Interval { kappa_low: f64, kappa_high: f64, declared: f64 },
}

/// Monte Carlo block marginal with raw counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalEstimate {
    pub probabilities: Vec<f64>,
    pub counts: Vec<u64>,
    pub samples: u64,
}

/// How expectations under a distribution are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evaluation {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// A mean with its standard error; exact values have zero error and zero samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn exact(mean: f64) -> Self {
        Estimate {
            mean,
            stderr: 0.0,
            samples: 0,
        }
    }
}

fn check_shape(n: u32, k: u32) -> Result<()> {
    if n == 0 || n > MAX_ARITY || k == 0 {
        return Err(Error::invalid(format!("unsupported block shape n={n}, k={k}")));
    }
    Ok(())
}

fn domain_size(bits: u32) -> Result<usize> {
    if bits > MAX_ARITY {
        return Err(Error::invalid(format!("{bits}-bit domain is too large for an explicit pmf")));
    }
    Ok(1usize << bits)
}

impl SmoothDistribution {
    pub fn uniform(n: u32, k: u32) -> Result<Self> {
        check_shape(n, k)?;
        Ok(SmoothDistribution {
            n,
            k,
            variant: Variant::Uniform,
            kappa: 1.0,
        })
    }

    /// Explicit pmf over flat indices, validated against the declared `κ`.
    pub fn explicit(n: u32, k: u32, pmf: Vec<f64>, kappa: f64) -> Result<Self> {
        check_shape(n, k)?;
        let size = domain_size(n * k)?;
        if pmf.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "pmf over {} bits needs {size} entries, got {}",
                n * k,
                pmf.len()
            )));
        }
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(Error::InvalidDistribution(format!("smoothness {kappa} must be at least 1")));
        }
        if let Some(bad) = pmf.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("invalid probability {bad}")));
        }
        let mut acc = NeumaierSum::new();
        let mut cdf = Vec::with_capacity(size);
        for &p in &pmf {
            acc.add(p);
            cdf.push(acc.value());
        }
        let total = acc.value();
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("pmf sums to {total}")));
        }
        let max = pmf.iter().copied().fold(0.0, f64::max);
        let cap = kappa / size as f64;
        if max > cap + PMF_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entry {max} exceeds the κ={kappa} cap {cap}"
            )));
        }
        Ok(SmoothDistribution {
            n,
            k,
            variant: Variant::Explicit {
                pmf: Arc::new(pmf),
                cdf: Arc::new(cdf),
            },
            kappa,
        })
    }

    /// Uniform conditioned on `predicate`, with `κ = 1/p` for the certified `p`.
    pub fn filtered(n: u32, k: u32, predicate: Predicate, certification: Certification) -> Result<Self> {
        check_shape(n, k)?;
        predicate.check_shape(n, k)?;
        let exact = || -> Option<f64> {
            predicate.pushforward_probability().or_else(|| {
                (n * k <= EXACT_DOMAIN_BITS).then(|| {
                    let hits = (0..1u64 << (n * k))
                        .into_par_iter()
                        .filter(|&i| predicate.accepts(&BlockInput::from_index(n, k, i).unwrap()))
                        .count();
                    hits as f64 / (1u64 << (n * k)) as f64
                })
            })
        };
        let acceptance = match certification {
            Certification::Exact => Acceptance::Exact(
                exact().ok_or_else(|| Error::invalid(format!("no exact acceptance for `{}`", predicate.name())))?,
            ),
            Certification::Auto { samples, seed } => match exact() {
                Some(p) => Acceptance::Exact(p),
                None => estimate_acceptance(&predicate, n, k, samples, seed)?,
            },
            Certification::Estimate { samples, seed } => estimate_acceptance(&predicate, n, k, samples, seed)?,
        };
        let p = acceptance.conservative();
        if !(p >= MIN_ACCEPTANCE) {
            return Err(Error::DegeneratePredicate {
                predicate: predicate.name(),
                acceptance: acceptance.point(),
                minimum: MIN_ACCEPTANCE,
            });
        }
        Ok(SmoothDistribution {
            n,
            k,
            variant: Variant::Filtered { predicate, acceptance },
            kappa: 1.0 / p,
        })
    }

    pub fn block_bits(&self) -> u32 {
        self.n
    }

    pub fn block_count(&self) -> u32 {
        self.k
    }

    pub fn domain_bits(&self) -> u32 {
        self.n * self.k
    }

    /// Certified smoothness parameter.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn name(&self) -> String {
        match &self.variant {
            Variant::Uniform => "uniform".into(),
            Variant::Explicit { .. } => "explicit".into(),
            Variant::Filtered { predicate, .. } => predicate.name(),
        }
    }

    pub fn acceptance(&self) -> Option<Acceptance> {
        match &self.variant {
            Variant::Filtered { acceptance, .. } => Some(*acceptance),
            _ => None,
        }
    }

    /// True when every probability is known exactly and the domain can be enumerated.
    pub fn has_exact_pmf(&self) -> bool {
        match &self.variant {
            Variant::Uniform => self.domain_bits() <= MAX_ARITY,
            Variant::Explicit { .. } => true,
            Variant::Filtered { acceptance, .. } => {
                self.domain_bits() <= EXACT_DOMAIN_BITS && matches!(acceptance, Acceptance::Exact(_))
            }
        }
    }

    /// Full pmf over flat indices.
    pub fn exact_pmf(&self) -> Result<Vec<f64>> {
        match &self.variant {
            Variant::Uniform => {
                let size = domain_size(self.domain_bits())?;
                Ok(vec![1.0 / size as f64; size])
            }
            Variant::Explicit { pmf, .. } => Ok(pmf.as_ref().clone()),
            Variant::Filtered { predicate, acceptance } => {
                if self.domain_bits() > EXACT_DOMAIN_BITS {
                    return Err(Error::invalid(format!(
                        "`{}` over {} bits has no explicit pmf",
                        predicate.name(),
                        self.domain_bits()
                    )));
                }
                let (n, k) = (self.n, self.k);
                let accepted: Vec<bool> = (0..1u64 << (n * k))
                    .into_par_iter()
                    .map(|i| predicate.accepts(&BlockInput::from_index(n, k, i).unwrap()))
                    .collect();
                let hits = accepted.iter().filter(|&&a| a).count();
                if let Acceptance::Exact(p) = acceptance {
                    let counted = hits as f64 / accepted.len() as f64;
                    if (counted - p).abs() > 1e-12 {
                        return Err(Error::Consistency(format!(
                            "acceptance {p} disagrees with enumeration {counted}"
                        )));
                    }
                }
                let mass = 1.0 / hits as f64;
                Ok(accepted.iter().map(|&a| if a { mass } else { 0.0 }).collect())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BlockInput> {
        match &self.variant {
            Variant::Uniform => BlockInput::random(self.n, self.k, rng),
            Variant::Explicit { pmf, cdf } => {
                let u: f64 = rng.gen::<f64>() * cdf[cdf.len() - 1];
                let mut index = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                // never return a zero-probability point from rounding at the top end
                while pmf[index] == 0.0 && index > 0 {
                    index -= 1;
                }
                BlockInput::from_index(self.n, self.k, index as u64)
            }
            Variant::Filtered { predicate, .. } => {
                for _ in 0..REJECTION_CAP {
                    let x = BlockInput::random(self.n, self.k, rng)?;
                    if predicate.accepts(&x) {
                        return Ok(x);
                    }
                }
                Err(Error::RejectionBudget {
                    predicate: predicate.name(),
                    attempts: REJECTION_CAP,
                })
            }
        }
    }

    /// `E_D[value(X)]`, exactly or by `samples` draws split into seeded chunks.
    pub fn expectation<F>(&self, mode: Evaluation, value: F) -> Result<Estimate>
    where
        F: Fn(&BlockInput) -> f64 + Sync,
    {
        match mode {
            Evaluation::Exact => {
                if !self.has_exact_pmf() {
                    return Err(Error::invalid(format!("`{}` has no exact pmf", self.name())));
                }
                let pmf = self.exact_pmf()?;
                let mut acc = NeumaierSum::new();
                for (i, &p) in pmf.iter().enumerate() {
                    if p != 0.0 {
                        acc.add(p * value(&BlockInput::from_index(self.n, self.k, i as u64)?));
                    }
                }
                Ok(Estimate::exact(acc.value()))
            }
            Evaluation::MonteCarlo { samples, seed } => {
                let values = self.sample_values(samples, seed, |x| value(x))?;
                let (mean, stderr) = mean_and_stderr(&values);
                Ok(Estimate {
                    mean,
                    stderr,
                    samples,
                })
            }
        }
    }

    /// Component-wise `E_D[value(X)]` for a vector-valued `value` of length `dim`.
    pub fn expectations<F>(&self, mode: Evaluation, dim: usize, value: F) -> Result<Vec<Estimate>>
    where
        F: Fn(&BlockInput) -> Vec<f64> + Sync,
    {
        match mode {
            Evaluation::Exact => {
                if !self.has_exact_pmf() {
                    return Err(Error::invalid(format!("`{}` has no exact pmf", self.name())));
                }
                let pmf = self.exact_pmf()?;
                let mut acc = vec![NeumaierSum::new(); dim];
                for (i, &p) in pmf.iter().enumerate() {
                    if p != 0.0 {
                        let v = value(&BlockInput::from_index(self.n, self.k, i as u64)?);
                        for (a, x) in acc.iter_mut().zip(v) {
                            a.add(p * x);
                        }
                    }
                }
                Ok(acc.iter().map(|a| Estimate::exact(a.value())).collect())
            }
            Evaluation::MonteCarlo { samples, seed } => {
                let rows = self.sample_values(samples, seed, |x| value(x))?;
                Ok((0..dim)
                    .map(|j| {
                        let column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                        let (mean, stderr) = mean_and_stderr(&column);
                        Estimate {
                            mean,
                            stderr,
                            samples,
                        }
                    })
                    .collect())
            }
        }
    }

    /// Draws `samples` points in chunks with independent substreams and maps each.
    /// The output order depends only on `(samples, seed)`.
    pub fn sample_values<T, F>(&self, samples: u64, seed: u64, value: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&BlockInput) -> T + Sync,
    {
        let chunks = samples.div_ceil(EXPECTATION_CHUNK);
        let parts = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng: Stream = substream(seed, EXPECTATION_TAG, c);
                let len = EXPECTATION_CHUNK.min(samples - c * EXPECTATION_CHUNK);
                (0..len)
                    .map(|_| self.sample(&mut rng).map(|x| value(&x)))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<Vec<Vec<T>>>>()?;
        Ok(parts.into_iter().flatten().collect())
    }

    /// `D_i(x) = Pr[X^{(i)} = x]` for every `x`, exactly.
    pub fn block_marginal(&self, block: usize) -> Result<Vec<f64>> {
        if block >= self.k as usize {
            return Err(Error::invalid(format!("block {block} out of range for {} blocks", self.k)));
        }
        let size = 1usize << self.n;
        if let Variant::Uniform = self.variant {
            return Ok(vec![1.0 / size as f64; size]);
        }
        let pmf = self.exact_pmf()?;
        let mut acc = vec![NeumaierSum::new(); size];
        let shift = block as u32 * self.n;
        for (index, &p) in pmf.iter().enumerate() {
            acc[(index >> shift) & (size - 1)].add(p);
        }
        Ok(acc.iter().map(NeumaierSum::value).collect())
    }

    /// Monte Carlo block marginal from `samples` draws.
    pub fn block_marginal_estimate<R: Rng + ?Sized>(&self, block: usize, samples: u64, rng: &mut R) -> Result<MarginalEstimate> {
        if block >= self.k as usize {
            return Err(Error::invalid(format!("block {block} out of range for {} blocks", self.k)));
        }
        let mut counts = vec![0u64; 1 << self.n];
        for _ in 0..samples {
            counts[self.sample(rng)?.block(block) as usize] += 1;
        }
        let probabilities = counts
            .iter()
            .map(|&c| if samples == 0 { 0.0 } else { c as f64 / samples as f64 })
            .collect();
        Ok(MarginalEstimate {
            probabilities,
            counts,
            samples,
        })
    }

    /// Fraction of pairs `(i, x)` with `2^n·D_i(x) ∉ [1 − v, 1 + v]`, together with
    /// the bound `2κ/(v²k)` it must respect.
    pub fn marginal_deviation(&self, v: f64) -> Result<(f64, f64)> {
        if !(v > 0.0) {
            return Err(Error::invalid(format!("deviation {v} must be positive")));
        }
        let m = (1u64 << self.n) as f64;
        let mut outside = 0u64;
        for i in 0..self.k as usize {
            outside += self
                .block_marginal(i)?
                .iter()
                .filter(|&&p| (m * p - 1.0).abs() > v)
                .count() as u64;
        }
        let fraction = outside as f64 / (self.k as f64 * m);
        Ok((fraction, 2.0 * self.kappa / (v * v * self.k as f64)))
    }

    /// Compares the observed smoothness `max_X D(X)·2^{n·k}` with the declared `κ`.
    pub fn smoothness_check(&self) -> Result<SmoothnessCheck> {
        if let Variant::Filtered {
            acceptance: Acceptance::Estimated { lower, upper, .. },
            ..
        } = self.variant
        {
            return Ok(SmoothnessCheck::Interval {
                kappa_low: 1.0 / upper,
                kappa_high: 1.0 / lower,
                declared: self.kappa,
            });
        }
        let observed = match &self.variant {
            Variant::Uniform => 1.0,
            Variant::Filtered {
                acceptance: Acceptance::Exact(p),
                ..
            } if !self.has_exact_pmf() => 1.0 / p,
            _ => {
                let pmf = self.exact_pmf()?;
                pmf.iter().copied().fold(0.0, f64::max) * pmf.len() as f64
            }
        };
        Ok(SmoothnessCheck::Exact {
            observed,
            declared: self.kappa,
            pass: observed <= self.kappa + 1e-12,
        })
    }

    /// Explicit distribution of `D` conditioned on `predicate`, declared `κ/p`.
    pub fn condition(&self, predicate: &Predicate) -> Result<SmoothDistribution> {
        predicate.check_shape(self.n, self.k)?;
        let pmf = self.exact_pmf()?;
        let mut kept = pmf.clone();
        let mut acc = NeumaierSum::new();
        for (i, p) in kept.iter_mut().enumerate() {
            if *p != 0.0 && predicate.accepts(&BlockInput::from_index(self.n, self.k, i as u64)?) {
                acc.add(*p);
            } else {
                *p = 0.0;
            }
        }
        let mass = acc.value();
        if !(mass >= MIN_ACCEPTANCE) {
            return Err(Error::DegeneratePredicate {
                predicate: predicate.name(),
                acceptance: mass,
                minimum: MIN_ACCEPTANCE,
            });
        }
        kept.iter_mut().for_each(|p| *p /= mass);
        // renormalise so that the conditioned pmf sums to one within tolerance
        let total = compensated_sum(kept.iter().copied());
        kept.iter_mut().for_each(|p| *p /= total);
        Self::explicit(self.n, self.k, kept, self.kappa / mass)
    }

    /// The same pmf as a density-`1/κ` distribution on `n·k` bits.
    pub fn to_density(&self) -> Result<DensityDistribution> {
        DensityDistribution::new(self.domain_bits(), self.exact_pmf()?, 1.0 / self.kappa)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_pmf_csv(&self.exact_pmf()?, writer)
    }

    /// Loads `(index, probability)` rows as an explicit distribution.
    pub fn read_csv<R: Read>(n: u32, k: u32, reader: R, kappa: f64) -> Result<Self> {
        Self::explicit(n, k, read_pmf_csv(reader)?, kappa)
    }
}

fn estimate_acceptance(predicate: &Predicate, n: u32, k: u32, samples: u64, seed: u64) -> Result<Acceptance> {
    if samples == 0 {
        return Err(Error::invalid("acceptance estimate needs samples"));
    }
    let chunks = samples.div_ceil(EXPECTATION_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, ACCEPTANCE_TAG, c);
            let len = EXPECTATION_CHUNK.min(samples - c * EXPECTATION_CHUNK);
            let mut hits = 0u64;
            for _ in 0..len {
                hits += predicate.accepts(&BlockInput::random(n, k, &mut rng)?) as u64;
            }
            Ok(hits)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    let (lower, upper) = wilson_interval(hits, samples, ACCEPTANCE_Z);
    Ok(Acceptance::Estimated {
        p_hat: hits as f64 / samples as f64,
        lower,
        upper,
        samples,
        hits,
    })
}

/// Uniform conditioned on `F(X) ≠ f_1(X^{(1)})` for an odd-majority lift.
pub fn anti_block_distribution(lift: Arc<LiftedFunction>, certification: Certification) -> Result<SmoothDistribution> {
    if !lift.outer().is_odd_majority() {
        return Err(Error::invalid("anti-block distribution needs an odd majority outer function"));
    }
    let (n, k) = (lift.block_bits(), lift.block_count());
    SmoothDistribution::filtered(n, k, Predicate::AntiBlock { lift, block: 0 }, certification)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BooleanFunction;

    fn rng() -> Stream {
        substream(5, 0, 0)
    }

    #[test]
    fn uniform_basics() {
        let d = SmoothDistribution::uniform(2, 3).unwrap();
        assert_eq!(d.kappa(), 1.0);
        assert_eq!(d.block_marginal(1).unwrap(), vec![0.25; 4]);
        assert!(matches!(d.smoothness_check().unwrap(), SmoothnessCheck::Exact { observed, pass: true, .. } if observed == 1.0));
        assert!(d.block_marginal(3).is_err());
    }

    #[test]
    fn explicit_validation_and_point_mass() {
        let mut pmf = vec![0.0; 16];
        pmf[9] = 1.0;
        assert!(SmoothDistribution::explicit(2, 2, pmf.clone(), 1.0).is_err());
        let d = SmoothDistribution::explicit(2, 2, pmf, 16.0).unwrap();
        let mut r = rng();
        for _ in 0..50 {
            assert_eq!(d.sample(&mut r).unwrap().to_index().unwrap(), 9);
        }
        assert_eq!(d.block_marginal(0).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(d.block_marginal(1).unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn smoothness_check_examples() {
        let mut pmf = vec![1.0 / 16.0; 16];
        pmf[0] = 2.0 / 16.0;
        pmf[1] = 0.0;
        let ok = SmoothDistribution::explicit(2, 2, pmf.clone(), 2.0).unwrap();
        assert!(matches!(ok.smoothness_check().unwrap(), SmoothnessCheck::Exact { pass: true, .. }));
        assert!(SmoothDistribution::explicit(2, 2, pmf, 1.0).is_err());
    }

    #[test]
    fn always_true_filter_is_uniform() {
        let pred = Predicate::MaskCondition {
            block: 0,
            mask: 0,
            value: 0,
        };
        let d = SmoothDistribution::filtered(3, 2, pred, Certification::Exact).unwrap();
        assert_eq!(d.kappa(), 1.0);
        assert_eq!(d.exact_pmf().unwrap(), vec![1.0 / 64.0; 64]);
    }

    #[test]
    fn anti_block_single_block_is_degenerate() {
        let mut r = rng();
        let f = BooleanFunction::random_balanced(3, &mut r).unwrap();
        let lift = LiftedFunction::new(Outer::majority(1).unwrap(), vec![f]).unwrap();
        let err = anti_block_distribution(Arc::new(lift), Certification::Exact).unwrap_err();
        assert!(matches!(err, Error::DegeneratePredicate { .. }));
    }

    #[test]
    fn anti_block_closed_form_matches_enumeration() {
        let mut r = rng();
        for k in [3u32, 5] {
            let lift = Arc::new(LiftedFunction::random(Outer::majority(k).unwrap(), 3, &mut r).unwrap());
            let d = anti_block_distribution(lift.clone(), Certification::Exact).unwrap();
            let pred = Predicate::AntiBlock { lift, block: 0 };
            let count = (0..1u64 << (3 * k))
                .filter(|&i| pred.accepts(&BlockInput::from_index(3, k, i).unwrap()))
                .count() as f64
                / (1u64 << (3 * k)) as f64;
            assert!((d.acceptance().unwrap().point() - count).abs() < 1e-15);
            // every accepted point has f_1·F = −1
            let e = d
                .expectation(Evaluation::Exact, |x| {
                    let y = d_lift_value(&pred, x);
                    y as f64
                })
                .unwrap();
            assert!((e.mean + 1.0).abs() < 1e-12);
        }
    }

    fn d_lift_value(pred: &Predicate, x: &BlockInput) -> i8 {
        let Predicate::AntiBlock { lift, .. } = pred else { unreachable!() };
        use crate::Hypothesis;
        let first = lift.inner()[0].get(x.block(0));
        first * lift.predict(x)
    }

    #[test]
    fn conditioning_scales_smoothness_by_inverse_probability() {
        let u = SmoothDistribution::uniform(2, 2).unwrap();
        let pred = Predicate::MaskCondition {
            block: 1,
            mask: 0b11,
            value: 0b01,
        };
        let c = u.condition(&pred).unwrap();
        let SmoothnessCheck::Exact { observed, pass, .. } = c.smoothness_check().unwrap() else { panic!() };
        assert!((observed - 4.0).abs() < 1e-12);
        assert!(pass);
        for i in 0..2 {
            let total: f64 = c.block_marginal(i).unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn estimated_acceptance_reports_interval() {
        let pred = Predicate::MaskCondition {
            block: 0,
            mask: 0b1,
            value: 0b1,
        };
        let d = SmoothDistribution::filtered(10, 3, pred, Certification::Estimate { samples: 20_000, seed: 3 }).unwrap();
        let Some(Acceptance::Estimated { lower, upper, p_hat, .. }) = d.acceptance() else { panic!() };
        assert!(lower <= 0.5 && 0.5 <= upper, "{lower} {p_hat} {upper}");
        assert!((d.kappa() - 1.0 / lower).abs() < 1e-12);
        assert!(matches!(d.smoothness_check().unwrap(), SmoothnessCheck::Interval { .. }));
    }

    #[test]
    fn explicit_csv_round_trip() {
        let pmf: Vec<f64> = (0..8).map(|i| if i < 4 { 0.25 } else { 0.0 }).collect();
        let d = SmoothDistribution::explicit(1, 3, pmf, 2.0).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(SmoothDistribution::read_csv(1, 3, buf.as_slice(), 2.0).unwrap(), d);
        assert!(SmoothDistribution::read_csv(1, 3, buf.as_slice(), 1.5).is_err());
    }
}
